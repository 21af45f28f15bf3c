#include "coutile/reputation.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace coutile;

namespace {

// Dense left principal eigenvector of c, scaled to sum 1.
std::vector<double> eigen_oracle(const NormalizedTrustMatrix& c)
{
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd ct(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            ct(j, i) = c.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::EigenSolver<Eigen::MatrixXd> es(ct);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < n; ++k)
        if (es.eigenvalues()[k].real() > es.eigenvalues()[best].real())
            best = k;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    return std::vector<double>(v.data(), v.data() + n);
}

LocalOpinionLedger random_ledger(std::size_t n, std::mt19937_64& rng)
{
    LocalOpinionLedger l(n);
    std::uniform_int_distribution<int> count(1, 6);
    for (PeerIndex i = 0; i < n; ++i)
        for (PeerIndex j = 0; j < n; ++j)
            if (i != j)
                for (int k = count(rng); k > 0; --k)
                    l.reward(i, j);
    return l;
}

double linf(std::span<const double> a, std::span<const double> b)
{
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace

TEST(Ledger, RewardPunishFloorAtZero)
{
    LocalOpinionLedger l(3);
    record_reward(l, 0, 1);
    record_reward(l, 0, 1);
    record_punishment(l, 0, 1);
    EXPECT_EQ(l.at(0, 1), 1.0);
    record_punishment(l, 0, 2);
    EXPECT_EQ(l.at(0, 2), 0.0);
    EXPECT_THROW(l.reward(1, 1), std::invalid_argument);
    EXPECT_THROW(l.reward(0, 3), std::out_of_range);
}

TEST(Normalize, RowsSumToOneAndEmptyRowIsUniform)
{
    LocalOpinionLedger l(4);
    l.reward(0, 1);
    l.reward(0, 1);
    l.reward(0, 2);
    auto c = normalize(l);
    EXPECT_DOUBLE_EQ(c.at(0, 1), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.at(0, 2), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.at(0, 3), 0.0);
    for (std::size_t j = 0; j < 4; ++j)
        EXPECT_DOUBLE_EQ(c.at(1, j), 0.25);
    for (std::size_t i = 0; i < 4; ++i) {
        auto r = c.row(i);
        EXPECT_NEAR(std::accumulate(r.begin(), r.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(Global, UniformMatrixIsFixedPoint)
{
    auto c = normalize(LocalOpinionLedger(5));
    std::vector<double> g0(5, 0.2);
    auto g = compute_global(c, g0);
    EXPECT_TRUE(g.converged());
    EXPECT_EQ(g.iterations, 1u);
    for (double v : g.g)
        EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(Global, TwoPeerExample)
{
    // c = [[0,1],[1/2,1/2]] has left eigenvector (1/3, 2/3).
    NormalizedTrustMatrix c(2, {0.0, 1.0, 0.5, 0.5});
    std::vector<double> g0{0.5, 0.5};
    auto g = compute_global(c, g0, 1e-12);
    EXPECT_NEAR(g.g[0], 1.0 / 3.0, 1e-10);
    EXPECT_NEAR(g.g[1], 2.0 / 3.0, 1e-10);
}

TEST(Global, MatchesDenseEigenOracle)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 3 + static_cast<std::size_t>(trial % 8);
        auto c = normalize(random_ledger(n, rng));
        std::vector<double> g0(n, 1.0 / static_cast<double>(n));
        auto g = compute_global(c, g0, 1e-10);
        ASSERT_TRUE(g.converged());
        EXPECT_LT(linf(g.g, eigen_oracle(c)), 1e-6) << "trial " << trial;
    }
}

TEST(Global, MassConservedEveryStep)
{
    std::mt19937_64 rng(12);
    auto c = normalize(random_ledger(9, rng));
    std::vector<double> g0{0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.05, 0.05};
    std::size_t steps = 0;
    compute_global(c, g0, 1e-9, 1000, [&](std::size_t, std::span<const double> g, double) {
        ++steps;
        EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-9);
    });
    EXPECT_GT(steps, 1u);
}

TEST(Global, RelabellingPermutesTheResult)
{
    std::mt19937_64 rng(13);
    const std::size_t n = 7;
    auto l = random_ledger(n, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LocalOpinionLedger moved(n);
    for (PeerIndex i = 0; i < n; ++i)
        for (PeerIndex j = 0; j < n; ++j)
            for (int k = 0; k < static_cast<int>(l.at(i, j)); ++k)
                moved.reward(perm[i], perm[j]);
    std::vector<double> g0(n, 1.0 / n);
    auto a = compute_global(normalize(l), g0, 1e-12);
    auto b = compute_global(normalize(moved), g0, 1e-12);
    for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(a.g[i], b.g[perm[i]], 1e-9);
}

TEST(Global, ConvergedVectorIsFixedPoint)
{
    std::mt19937_64 rng(14);
    auto c = normalize(random_ledger(6, rng));
    std::vector<double> g0(6, 1.0 / 6);
    auto g = compute_global(c, g0, 1e-12);
    auto again = compute_global(c, g.g, 1e-12);
    EXPECT_LT(linf(g.g, again.g), 1e-11);
}

TEST(Global, MaxIterationsFlagged)
{
    // A 2-cycle never converges from a skewed start.
    NormalizedTrustMatrix c(2, {0.0, 1.0, 1.0, 0.0});
    std::vector<double> g0{0.9, 0.1};
    auto g = compute_global(c, g0, 1e-6, 25);
    EXPECT_FALSE(g.converged());
    EXPECT_EQ(g.status, ConvergenceStatus::MaxIterationsReached);
    EXPECT_EQ(g.iterations, 25u);
}

TEST(Global, NewcomerGetsOneOverN)
{
    EXPECT_DOUBLE_EQ(admit_new_peer(100), 0.01);
}

TEST(Global, ReputationCsvFormat)
{
    std::ostringstream out;
    std::vector<double> good{1.0, 0.0}, g{0.75, 0.25};
    write_reputation_csv(out, good, g);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "peer_index,goodness,global_reputation");
}
