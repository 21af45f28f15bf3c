#pragma once

#include "coutile/channel.hpp"
#include "coutile/computations.hpp"
#include "coutile/config.hpp"
#include "coutile/trace.hpp"
#include "coutile/types.hpp"
#include "coutile/world.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace coutile {

struct Session {
    std::vector<PeerIndex> clients;
    std::vector<InputValue> inputs; // inputs[i] belongs to clients[i]
    ComputationSpec computation;
    std::size_t redundancy = 1;
    // Secret to each client; never written to any peer-visible structure.
    std::vector<std::size_t> kappa;
    std::vector<crypto::SymKey> keys;
};

/// Draws kappa_i uniformly in [r+1, kappa_max] and one symmetric key per client.
Session make_session(std::vector<PeerIndex> clients, std::vector<InputValue> inputs,
                     ComputationSpec computation, const SimConfig& config,
                     const crypto::CipherSuite& suite, Rng& rng);

/// C_i: the part of C that yields client i's output, carrying I_i when needed.
ComputationSpec prune_computation(const ComputationSpec& c, const Session& session, std::size_t i);

/// r workers drawn uniformly from the kappa peers (other than `self`) whose
/// reputations are closest to g_i; distance ties go to the lower roster index.
std::vector<PeerIndex> select_workers(PeerIndex self, double g_i, std::size_t kappa,
                                      std::size_t r, std::span<const double> reputations,
                                      Rng& rng);

/// Most frequent non-nil value; ties go to the smallest canonical encoding.
MaybeOutput majority_output(std::span<const MaybeOutput> outputs);

struct WorkerSlate {
    PeerIndex client = 0;
    std::vector<PeerIndex> workers;
    std::vector<MaybeOutput> returned;
};

/// Workers that returned the (non-nil) majority are rewarded, all others punished.
void settle_rewards(const WorkerSlate& slate, const MaybeOutput& majority,
                    AccountabilityRegistry& registry);

/// Each of the client's managers punishes it unless it shows a valid receipt
/// for every non-nil dispatch that came back through a forwardee.
/// Returns how many managers punished.
std::size_t audit_receipts(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                           PeerIndex client, std::span<const RewardReceipt> receipts,
                           std::size_t expected, AccountabilityRegistry& registry,
                           std::uint64_t iteration);

struct SessionStats {
    std::size_t forward_messages = 0;
    std::size_t hops = 0;
    std::size_t discards = 0;
    std::size_t refusals = 0;
    std::size_t no_forwardee = 0;
    std::size_t degraded_submissions = 0; // originator had to submit directly
    std::size_t hop_caps = 0;
    std::size_t timeouts = 0;
    std::size_t broken_paths = 0;
    std::size_t decrypt_failures = 0;
    std::size_t receipts = 0;
    std::size_t audit_punishments = 0;
};

struct ClientOutcome {
    PeerIndex client = 0;
    double reputation_at_request = 0.0;
    WorkerSlate slate;
    MaybeOutput output;
    OutputValue truth;
    bool correct = false;
    std::vector<RewardReceipt> receipts;
    std::size_t receipts_expected = 0;
    std::size_t audit_punishments = 0;
};

/// A finished forward message: simulator-private route for hop statistics.
struct DeliveredPath {
    MessageId message = 0;
    bool computation = false;
    HopPath path; // originator ... submitter, destination
};

struct SessionOutcome {
    std::vector<ClientOutcome> clients;
    SessionStats stats;
    std::vector<DeliveredPath> paths;
    std::unordered_map<MessageId, PeerIndex> originators;
    // Public bulletin in publish mode: spec encoding -> posted outputs.
    std::map<Bytes, std::vector<MaybeOutput>> bulletin;
};

struct SessionOptions {
    TraceLog* trace = nullptr;
    bool record_paths = false;
    // Test hook: overrides the per-act goodness draw for (client slot, dispatch k, worker).
    std::function<bool(std::size_t client_slot, std::size_t k, PeerIndex worker)> honest;
    // Test hook: replaces worker selection for a client slot.
    std::function<std::vector<PeerIndex>(std::size_t client_slot)> workers;
};

/// Runs one joint computation end to end in the world's configured mode:
/// input broadcast, dispatch to workers, computation, reverse delivery (or
/// bulletin posting), majority, and, in rational mode only, rewards,
/// punishments and the receipt audit. Reputations are read but not recomputed.
SessionOutcome run_session(World& world, const Session& session, const SessionOptions& options = {});

} // namespace coutile
