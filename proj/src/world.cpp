#include "coutile/world.hpp"

#include "coutile/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace coutile {

std::vector<double> World::goodness() const
{
    std::vector<double> out;
    out.reserve(peers.size());
    for (const auto& p : peers)
        out.push_back(p.goodness);
    return out;
}

namespace {

Bytes draw_bytes(Rng& rng, std::size_t n)
{
    Bytes out(n);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng() >> 56);
    return out;
}

} // namespace

World build_world(const SimConfig& config)
{
    validate(config);
    World w;
    w.config = config;
    w.suite = crypto::make_suite(config.crypto);
    w.rng.seed(config.seed);

    const std::size_t n = config.peers;
    w.peers.resize(n);
    for (PeerIndex i = 0; i < n; ++i) {
        auto& p = w.peers[i];
        p.id = RealId{bytes_of("peer-" + std::to_string(i))};
        p.nonce = draw_bytes(w.rng, 16);
        p.pseudonym = derive_pseudonym(p.id, p.nonce);
        p.keys = w.suite->generate_keypair(draw_bytes(w.rng, 32));
    }

    const auto bad = static_cast<std::size_t>(std::floor(config.malicious_frac * static_cast<double>(n) + 1e-9));
    std::vector<PeerIndex> order(n);
    std::iota(order.begin(), order.end(), PeerIndex{0});
    std::shuffle(order.begin(), order.end(), w.rng);
    for (std::size_t k = 0; k < bad; ++k)
        w.peers[order[k]].goodness = 0.0;

    w.directory.pseudonyms.reserve(n);
    w.directory.public_keys.reserve(n);
    for (const auto& p : w.peers) {
        w.directory.pseudonyms.push_back(p.pseudonym);
        w.directory.public_keys.push_back(p.keys.public_key);
    }

    std::vector<std::vector<PeerIndex>> managers(n);
    for (PeerIndex i = 0; i < n; ++i) {
        auto a = assign_accountability_managers(w.peers[i].pseudonym, w.directory.pseudonyms,
                                                config.managers);
        w.peers[i].managers = a.managers;
        managers[i] = std::move(a.managers);
    }
    w.registry = AccountabilityRegistry(n, std::move(managers));
    w.reputation.assign(n, admit_new_peer(n));
    return w;
}

OutputValue malicious_worker_output(const ComputationSpec& spec, const JointInput& inputs, Rng& rng)
{
    return random_output(spec, inputs, rng);
}

} // namespace coutile
