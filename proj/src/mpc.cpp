#include "coutile/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coutile {

Session make_session(std::vector<PeerIndex> clients, std::vector<InputValue> inputs,
                     ComputationSpec computation, const SimConfig& config,
                     const crypto::CipherSuite& suite, Rng& rng)
{
    if (clients.size() < 4)
        throw ConfigError("m must be ≥ 4");
    if (clients.size() != inputs.size())
        throw ConfigError("one input per client required");
    if (config.kappa_max <= config.redundancy)
        throw ConfigError("kappa_max must be > r");
    Session s;
    s.clients = std::move(clients);
    s.inputs = std::move(inputs);
    s.computation = std::move(computation);
    s.redundancy = config.mode == Mode::Hbc ? 1 : config.redundancy;
    std::uniform_int_distribution<std::size_t> kappa(config.redundancy + 1, config.kappa_max);
    for (std::size_t i = 0; i < s.clients.size(); ++i) {
        s.kappa.push_back(kappa(rng));
        Bytes seed(32);
        for (auto& b : seed)
            b = static_cast<std::uint8_t>(rng() >> 56);
        s.keys.push_back(suite.generate_sym_key(seed));
    }
    return s;
}

ComputationSpec prune_computation(const ComputationSpec& c, const Session& session, std::size_t i)
{
    if (i >= session.clients.size())
        throw std::out_of_range("client slot out of range");
    ComputationSpec ci = c;
    if (requires_embedded_input(c))
        ci.embedded_input = session.inputs[i];
    else
        ci.embedded_input.reset();
    return ci;
}

std::vector<PeerIndex> select_workers(PeerIndex self, double g_i, std::size_t kappa,
                                      std::size_t r, std::span<const double> reputations,
                                      Rng& rng)
{
    if (kappa <= r)
        throw ConfigError("kappa must be > r");
    if (reputations.size() < kappa + 1)
        throw ConfigError("roster too small for kappa");
    std::vector<PeerIndex> others;
    others.reserve(reputations.size() - 1);
    for (PeerIndex t = 0; t < reputations.size(); ++t)
        if (t != self)
            others.push_back(t);
    std::stable_sort(others.begin(), others.end(), [&](PeerIndex a, PeerIndex b) {
        return std::abs(reputations[a] - g_i) < std::abs(reputations[b] - g_i);
    });
    others.resize(kappa);
    std::vector<PeerIndex> chosen;
    chosen.reserve(r);
    // Partial Fisher-Yates over the candidate pool.
    for (std::size_t k = 0; k < r; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, others.size() - 1);
        std::swap(others[k], others[pick(rng)]);
        chosen.push_back(others[k]);
    }
    return chosen;
}

MaybeOutput majority_output(std::span<const MaybeOutput> outputs)
{
    std::map<Bytes, std::pair<std::size_t, const OutputValue*>> counts;
    for (const auto& o : outputs) {
        if (!o)
            continue;
        auto& slot = counts[canonical_encoding(*o)];
        ++slot.first;
        slot.second = &*o;
    }
    const OutputValue* best = nullptr;
    std::size_t best_count = 0;
    // std::map iterates in ascending encoding order, so '>' keeps the smallest on ties.
    for (const auto& [enc, entry] : counts) {
        if (entry.first > best_count) {
            best_count = entry.first;
            best = entry.second;
        }
    }
    if (!best)
        return std::nullopt;
    return *best;
}

void settle_rewards(const WorkerSlate& slate, const MaybeOutput& majority,
                    AccountabilityRegistry& registry)
{
    for (std::size_t k = 0; k < slate.workers.size(); ++k) {
        const auto& out = k < slate.returned.size() ? slate.returned[k] : MaybeOutput{};
        if (majority && out && *out == *majority)
            registry.reward(slate.client, slate.workers[k]);
        else
            registry.punish(slate.client, slate.workers[k]);
    }
}

std::size_t audit_receipts(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                           PeerIndex client, std::span<const RewardReceipt> receipts,
                           std::size_t expected, AccountabilityRegistry& registry,
                           std::uint64_t iteration)
{
    std::vector<Bytes> seen;
    std::size_t valid = 0;
    for (const auto& rc : receipts) {
        if (!verify_receipt(suite, dir, client, rc))
            continue;
        if (std::find(seen.begin(), seen.end(), rc.context) != seen.end())
            continue;
        seen.push_back(rc.context);
        ++valid;
    }
    if (valid >= expected)
        return 0;
    const auto& ams = registry.managers_of(client);
    for (auto am : ams)
        registry.audit_punish(am, client, iteration);
    return ams.size();
}

} // namespace coutile
