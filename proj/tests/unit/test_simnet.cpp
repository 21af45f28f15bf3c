#include "coutile/simulation.hpp"
#include "coutile/trace.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace coutile;

namespace {

SimConfig quick(std::size_t iterations, std::uint64_t seed = 1)
{
    SimConfig c;
    c.peers = 30;
    c.clients = 6;
    c.iterations = iterations;
    c.seed = seed;
    return c;
}

} // namespace

TEST(World, MaliciousCountAndPlacement)
{
    SimConfig c;
    auto w = build_world(c);
    EXPECT_EQ(w.size(), 100u);
    auto g = w.goodness();
    EXPECT_EQ(std::count(g.begin(), g.end(), 0.0), 20);
    EXPECT_EQ(std::count(g.begin(), g.end(), 1.0), 80);
    for (double r : w.reputation)
        EXPECT_DOUBLE_EQ(r, 0.01);
    c.seed = 2;
    EXPECT_NE(build_world(c).goodness(), g);
}

TEST(World, DeterministicInSeed)
{
    SimConfig c;
    auto a = build_world(c);
    auto b = build_world(c);
    EXPECT_EQ(a.goodness(), b.goodness());
    EXPECT_EQ(a.directory.pseudonyms, b.directory.pseudonyms);
    EXPECT_EQ(a.directory.public_keys, b.directory.public_keys);
    for (PeerIndex i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.peers[i].managers, b.peers[i].managers);
        EXPECT_EQ(a.peers[i].managers.size(), 3u);
    }
}

TEST(World, PseudonymsAreProvableAndDistinct)
{
    auto w = build_world(quick(0));
    std::set<Pseudonym> uniq(w.directory.pseudonyms.begin(), w.directory.pseudonyms.end());
    EXPECT_EQ(uniq.size(), w.size());
    for (const auto& p : w.peers)
        EXPECT_TRUE(prove_pseudonym(p.id, p.nonce, p.pseudonym));
}

TEST(Inputs, DistinctNumbersInRange)
{
    Rng rng(3);
    auto in = draw_inputs(rank_of_input_spec(), 50, rng);
    std::set<std::int64_t> seen;
    for (auto& v : in) {
        auto x = std::get<std::int64_t>(v);
        EXPECT_GE(x, 0);
        EXPECT_LT(x, 1000000);
        seen.insert(x);
    }
    EXPECT_EQ(seen.size(), 50u);
}

TEST(Simulation, ZeroIterationsLeaveUniformReputation)
{
    auto m = run_simulation(quick(0));
    EXPECT_EQ(m.iterations, 0u);
    EXPECT_TRUE(m.requests.empty());
    for (double r : m.final_reputation)
        EXPECT_DOUBLE_EQ(r, 1.0 / 30.0);
}

TEST(Simulation, RowsPerIterationAreTheClients)
{
    auto cfg = quick(1);
    auto w = build_world(cfg);
    RunMetrics metrics;
    auto rows = run_iteration(w, metrics);
    ASSERT_EQ(rows.size(), cfg.clients);
    std::set<PeerIndex> clients;
    for (const auto& r : rows) {
        EXPECT_EQ(r.iteration, 1u);
        clients.insert(r.client);
    }
    EXPECT_EQ(clients.size(), cfg.clients);
}

TEST(Simulation, AllHonestIterationIsCorrect)
{
    for (Mode mode : {Mode::Rational, Mode::Baseline, Mode::Hbc}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto cfg = quick(1, seed);
            cfg.malicious_frac = 0.0;
            cfg.mode = mode;
            for (const auto& r : run_simulation(cfg).requests)
                EXPECT_TRUE(r.correct) << mode_name(mode) << " seed " << seed;
        }
    }
}

TEST(Simulation, AllHonestWithoutReputationStaysCorrect)
{
    // Without reputation gating nothing can go wrong over many iterations.
    // Rational mode is different: rewards spread reputations apart and
    // workers then refuse low submitters even when everyone is honest.
    for (Mode mode : {Mode::Baseline, Mode::Hbc}) {
        auto cfg = quick(30, 4);
        cfg.malicious_frac = 0.0;
        cfg.mode = mode;
        for (const auto& r : run_simulation(cfg).requests)
            EXPECT_TRUE(r.correct) << mode_name(mode) << " iteration " << r.iteration;
    }
}

TEST(Simulation, EveryComputationIsPossible)
{
    for (const char* comp : {"rank", "diffs", "tally"}) {
        auto cfg = quick(5, 5);
        cfg.malicious_frac = 0.0;
        cfg.mode = Mode::Baseline;
        cfg.computation = comp;
        for (const auto& r : run_simulation(cfg).requests)
            EXPECT_TRUE(r.correct) << comp;
    }
}

TEST(Simulation, MassConservedAfterEveryUpdate)
{
    auto m = run_simulation(quick(40, 6));
    EXPECT_EQ(m.reputation_updates, 40u);
    EXPECT_LT(m.worst_mass_error, 1e-9);
    EXPECT_NEAR(std::accumulate(m.final_reputation.begin(), m.final_reputation.end(), 0.0), 1.0,
                1e-9);
    EXPECT_EQ(m.unconverged_updates, 0u);
}

TEST(Simulation, BaselineDiffersFromRational)
{
    auto cfg = quick(15, 7);
    auto rational = run_simulation(cfg);
    cfg.mode = Mode::Baseline;
    auto baseline = run_simulation(cfg);
    EXPECT_EQ(baseline.reputation_updates, 0u);
    for (double r : baseline.final_reputation)
        EXPECT_DOUBLE_EQ(r, 1.0 / 30.0);
    EXPECT_NE(rational.final_reputation, baseline.final_reputation);
}

TEST(Simulation, SameSeedSameMetrics)
{
    auto a = run_simulation(quick(10, 8));
    auto b = run_simulation(quick(10, 8));
    EXPECT_EQ(a.final_reputation, b.final_reputation);
    ASSERT_EQ(a.requests.size(), b.requests.size());
    for (std::size_t i = 0; i < a.requests.size(); ++i) {
        EXPECT_EQ(a.requests[i].client, b.requests[i].client);
        EXPECT_EQ(a.requests[i].correct, b.requests[i].correct);
    }
}

TEST(Simulation, EveryPeerBecomesAClient)
{
    // Coupon collector with 10 of 100 drawn per round: after 250 rounds a
    // peer is missed with probability 0.9^250 ~ 4e-12.
    SimConfig cfg;
    cfg.mode = Mode::Hbc;
    cfg.malicious_frac = 0.0;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        cfg.seed = seed;
        auto m = run_simulation(cfg);
        std::set<PeerIndex> seen;
        for (const auto& r : m.requests)
            seen.insert(r.client);
        EXPECT_GE(seen.size(), 99u);
    }
}

TEST(Simulation, TraceHidesOriginators)
{
    for (Mode mode : {Mode::Hbc, Mode::Rational}) {
        auto cfg = quick(10, 9);
        cfg.mode = mode;
        TraceLog log;
        std::unordered_map<std::uint64_t, PeerIndex> origins;
        RunOptions opt;
        opt.trace = &log;
        opt.originators = &origins;
        auto m = run_simulation(cfg, opt);
        ASSERT_FALSE(log.events().empty());
        auto audit = audit_anonymity(log.events(), origins);
        EXPECT_EQ(audit.records, log.events().size());
        // An originator that no peer will accept from has to submit itself:
        // one no_forwardee and one submit record, both naming it.
        EXPECT_EQ(audit.violations, 2 * m.totals.degraded_submissions) << mode_name(mode);
        if (mode == Mode::Hbc) {
            EXPECT_EQ(audit.violations, 0u);
        }
    }
}

TEST(Simulation, HopCapForcesSubmission)
{
    auto cfg = quick(3, 10);
    cfg.p_forward = 1.0;
    cfg.max_hops = 5;
    cfg.malicious_frac = 0.0;
    cfg.mode = Mode::Hbc;
    auto m = run_simulation(cfg);
    EXPECT_GT(m.totals.hop_caps, 0u);
    for (const auto& r : m.requests)
        EXPECT_TRUE(r.correct);
}

TEST(Trace, AuditFlagsExposedOriginators)
{
    std::unordered_map<std::uint64_t, PeerIndex> origins{{1, 4}};
    std::vector<TraceEvent> events{
        {1, TraceKind::Hop, 7, 9, 1, 1},       // first forwardee: fine
        {1, TraceKind::Hop, 4, 9, 3, 1},       // originator relaying after a loop
        {1, TraceKind::Submit, 4, 9, 0, 1},    // direct submission by the originator
        {1, TraceKind::Reverse, 7, 4, 1, 1},   // handing the output to the originator
        {1, TraceKind::Hop, 2, 9, 1, 99},      // unknown message
    };
    auto a = audit_anonymity(events, origins);
    EXPECT_EQ(a.records, 5u);
    EXPECT_EQ(a.loopbacks, 1u);
    EXPECT_EQ(a.violations, 2u);
}
