#pragma once

#include "coutile/accountability.hpp"
#include "coutile/channel.hpp"
#include "coutile/config.hpp"
#include "coutile/crypto.hpp"
#include "coutile/identity.hpp"
#include "coutile/types.hpp"

#include <memory>
#include <vector>

namespace coutile {

struct PeerRecord {
    RealId id;
    Bytes nonce;
    Pseudonym pseudonym;
    crypto::KeyPair keys;
    // Probability of computing honestly when acting as a worker.
    double goodness = 1.0;
    std::vector<PeerIndex> managers;
    // Scripted deviation: a client that never commits to rewarding its first forwardee.
    bool rewards_first_forwardee = true;
};

struct World {
    SimConfig config;
    std::unique_ptr<crypto::CipherSuite> suite;
    std::vector<PeerRecord> peers;
    PublicDirectory directory;
    AccountabilityRegistry registry;
    std::vector<double> reputation;
    Rng rng;
    std::uint64_t iteration = 0;
    std::uint64_t next_message = 1;

    std::size_t size() const { return peers.size(); }
    std::vector<double> goodness() const;
};

/// floor(malicious_frac * n) peers, placed by the seed, get goodness 0; the
/// rest goodness 1. Everyone starts at reputation 1/n.
World build_world(const SimConfig& config);

/// What a dishonest worker returns: a uniform draw from the output domain.
OutputValue malicious_worker_output(const ComputationSpec& spec, const JointInput& inputs, Rng& rng);

} // namespace coutile
