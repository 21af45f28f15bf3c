#pragma once

#include "coutile/config.hpp"
#include "coutile/mpc.hpp"
#include "coutile/trace.hpp"
#include "coutile/world.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace coutile {

struct RequestRecord {
    std::uint64_t iteration = 0; // 1-based
    PeerIndex client = 0;
    double reputation = 0.0; // client's global reputation when it requested
    bool correct = false;
};

struct RunMetrics {
    std::size_t iterations = 0;
    std::vector<RequestRecord> requests;
    std::vector<double> goodness;
    std::vector<double> final_reputation;
    SessionStats totals;
    std::size_t reputation_updates = 0;
    std::size_t unconverged_updates = 0;
    std::size_t power_steps = 0;
    // Largest |sum g - 1| seen after any reputation update.
    double worst_mass_error = 0.0;
};

struct RunOptions {
    TraceLog* trace = nullptr;
    // Filled with message -> originator when tracing, for the anonymity audit.
    std::unordered_map<std::uint64_t, PeerIndex>* originators = nullptr;
    // Peers scripted to skip rewarding their first forwardee.
    std::vector<PeerIndex> non_rewarding;
};

/// Computation named by config.computation, for the given client count.
ComputationSpec configured_computation(const SimConfig& config);

/// m distinct integers uniform in [0, 10^6), or uniform ballots for a tally.
std::vector<InputValue> draw_inputs(const ComputationSpec& spec, std::size_t m, Rng& rng);

/// One iteration: pick m distinct clients, run the session, then (rational
/// mode) recompute global reputation from the managers' consensus, warm
/// started from the current vector.
std::vector<RequestRecord> run_iteration(World& world, RunMetrics& metrics,
                                         const RunOptions& options = {});

RunMetrics run_simulation(const SimConfig& config, const RunOptions& options = {});

/// Continue an existing world for config.iterations more iterations.
RunMetrics run_world(World& world, const RunOptions& options = {});

} // namespace coutile
