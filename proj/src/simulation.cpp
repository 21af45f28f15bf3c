#include "coutile/simulation.hpp"

#include "coutile/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace coutile {

namespace {

const std::vector<std::string>& ballot_options()
{
    static const std::vector<std::string> options = {"alpha", "beta", "gamma", "delta"};
    return options;
}

void accumulate(SessionStats& into, const SessionStats& s)
{
    into.forward_messages += s.forward_messages;
    into.hops += s.hops;
    into.discards += s.discards;
    into.refusals += s.refusals;
    into.no_forwardee += s.no_forwardee;
    into.degraded_submissions += s.degraded_submissions;
    into.hop_caps += s.hop_caps;
    into.timeouts += s.timeouts;
    into.broken_paths += s.broken_paths;
    into.decrypt_failures += s.decrypt_failures;
    into.receipts += s.receipts;
    into.audit_punishments += s.audit_punishments;
}

} // namespace

ComputationSpec configured_computation(const SimConfig& config)
{
    if (config.computation == "diffs")
        return neighbor_diffs_spec();
    if (config.computation == "tally")
        return vote_tally_spec(ballot_options());
    return rank_of_input_spec();
}

std::vector<InputValue> draw_inputs(const ComputationSpec& spec, std::size_t m, Rng& rng)
{
    std::vector<InputValue> out;
    out.reserve(m);
    if (spec.kind == ComputationKind::VoteTally) {
        const auto options = tally_options(spec);
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        for (std::size_t i = 0; i < m; ++i)
            out.emplace_back(options[pick(rng)]);
        return out;
    }
    std::uniform_int_distribution<std::int64_t> value(0, 999'999);
    std::set<std::int64_t> seen;
    while (out.size() < m) {
        auto v = value(rng);
        if (seen.insert(v).second)
            out.emplace_back(v);
    }
    return out;
}

std::vector<RequestRecord> run_iteration(World& world, RunMetrics& metrics, const RunOptions& options)
{
    const auto& cfg = world.config;
    ++world.iteration;

    std::vector<PeerIndex> roster(world.size());
    std::iota(roster.begin(), roster.end(), PeerIndex{0});
    std::vector<PeerIndex> clients;
    clients.reserve(cfg.clients);
    for (std::size_t k = 0; k < cfg.clients; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, roster.size() - 1);
        std::swap(roster[k], roster[pick(world.rng)]);
        clients.push_back(roster[k]);
    }

    auto spec = configured_computation(cfg);
    auto inputs = draw_inputs(spec, clients.size(), world.rng);
    auto session = make_session(clients, std::move(inputs), std::move(spec), cfg, *world.suite,
                                world.rng);

    SessionOptions sopt;
    sopt.trace = options.trace;
    auto outcome = run_session(world, session, sopt);
    accumulate(metrics.totals, outcome.stats);
    if (options.originators)
        options.originators->insert(outcome.originators.begin(), outcome.originators.end());

    std::vector<RequestRecord> rows;
    rows.reserve(outcome.clients.size());
    for (const auto& c : outcome.clients)
        rows.push_back({world.iteration, c.client, c.reputation_at_request, c.correct});

    if (cfg.mode == Mode::Rational) {
        auto c = normalize(world.registry.consensus());
        auto g = compute_global(c, world.reputation, cfg.epsilon, cfg.max_iter,
                                [&](std::size_t, std::span<const double> v, double) {
                                    double sum = std::accumulate(v.begin(), v.end(), 0.0);
                                    metrics.worst_mass_error =
                                        std::max(metrics.worst_mass_error, std::abs(sum - 1.0));
                                });
        ++metrics.reputation_updates;
        metrics.power_steps += g.iterations;
        if (!g.converged())
            ++metrics.unconverged_updates;
        world.reputation = std::move(g.g);
    }

    metrics.requests.insert(metrics.requests.end(), rows.begin(), rows.end());
    ++metrics.iterations;
    return rows;
}

RunMetrics run_world(World& world, const RunOptions& options)
{
    for (auto p : options.non_rewarding)
        world.peers.at(p).rewards_first_forwardee = false;
    RunMetrics metrics;
    metrics.goodness = world.goodness();
    metrics.requests.reserve(world.config.iterations * world.config.clients);
    for (std::size_t t = 0; t < world.config.iterations; ++t)
        run_iteration(world, metrics, options);
    metrics.final_reputation = world.reputation;
    return metrics;
}

RunMetrics run_simulation(const SimConfig& config, const RunOptions& options)
{
    World world = build_world(config);
    return run_world(world, options);
}

} // namespace coutile
