#include "coutile/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace coutile {

LocalOpinionLedger::LocalOpinionLedger(std::size_t peers) : n_(peers), counts_(peers * peers, 0.0)
{
}

void LocalOpinionLedger::check(PeerIndex rater, PeerIndex ratee) const
{
    if (rater >= n_ || ratee >= n_)
        throw std::out_of_range("peer index outside ledger");
    if (rater == ratee)
        throw std::invalid_argument("a peer cannot rate itself");
}

void LocalOpinionLedger::reward(PeerIndex rater, PeerIndex ratee)
{
    check(rater, ratee);
    cell(rater, ratee) += 1.0;
}

void LocalOpinionLedger::punish(PeerIndex rater, PeerIndex ratee)
{
    check(rater, ratee);
    auto& v = cell(rater, ratee);
    v = (v > 1.0) ? v - 1.0 : 0.0;
}

void record_reward(LocalOpinionLedger& ledger, PeerIndex rater, PeerIndex ratee)
{
    ledger.reward(rater, ratee);
}

void record_punishment(LocalOpinionLedger& ledger, PeerIndex rater, PeerIndex ratee)
{
    ledger.punish(rater, ratee);
}

NormalizedTrustMatrix::NormalizedTrustMatrix(std::size_t n, std::vector<double> values)
    : n_(n), c_(std::move(values))
{
    if (c_.size() != n * n)
        throw std::invalid_argument("trust matrix must be n x n");
}

NormalizedTrustMatrix normalize(const LocalOpinionLedger& ledger)
{
    const auto n = ledger.size();
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = ledger.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                sum += row[j];
        double* out = c.data() + i * n;
        if (sum > 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                out[j] = j == i ? 0.0 : row[j] / sum;
        } else {
            for (std::size_t j = 0; j < n; ++j)
                out[j] = 1.0 / static_cast<double>(n);
        }
    }
    return NormalizedTrustMatrix(n, std::move(c));
}

GlobalReputation compute_global(const NormalizedTrustMatrix& c, std::span<const double> g0,
                                double epsilon, std::size_t max_iter,
                                const StepObserver& observer)
{
    const auto n = c.size();
    if (g0.size() != n)
        throw std::invalid_argument("initial reputation vector has the wrong length");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");

    GlobalReputation out;
    out.g.assign(g0.begin(), g0.end());
    if (n == 0)
        return out;

    std::vector<double> next(n);
    out.status = ConvergenceStatus::MaxIterationsReached;
    for (std::size_t k = 0; k < max_iter; ++k) {
        // g_d <- sum_j c_jd g_j, accumulated row by row for locality.
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double gj = out.g[j];
            if (gj == 0.0)
                continue;
            auto row = c.row(j);
            for (std::size_t d = 0; d < n; ++d)
                next[d] += row[d] * gj;
        }
        double delta = 0.0;
        for (std::size_t d = 0; d < n; ++d)
            delta = std::max(delta, std::abs(next[d] - out.g[d]));
        out.g.swap(next);
        out.iterations = k + 1;
        out.last_delta = delta;
        if (observer)
            observer(out.iterations, out.g, delta);
        if (delta < epsilon) {
            out.status = ConvergenceStatus::Converged;
            break;
        }
    }
    return out;
}

double admit_new_peer(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("roster is empty");
    return 1.0 / static_cast<double>(n);
}

void write_reputation_csv(std::ostream& out, std::span<const double> goodness,
                          std::span<const double> g)
{
    if (goodness.size() != g.size())
        throw std::invalid_argument("goodness and reputation vectors differ in length");
    out << "peer_index,goodness,global_reputation\n";
    char line[96];
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g\n", i, goodness[i], g[i]);
        out << line;
    }
}

} // namespace coutile
