#pragma once

#include "coutile/types.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace coutile {

/// Accumulated local opinions: at(i, j) is peer i's opinion of peer j.
/// Rewards add one, punishments subtract one with a floor at zero, and the
/// diagonal is never written.
class LocalOpinionLedger {
public:
    explicit LocalOpinionLedger(std::size_t peers = 0);

    std::size_t size() const { return n_; }
    double at(PeerIndex rater, PeerIndex ratee) const { return counts_[rater * n_ + ratee]; }
    std::span<const double> row(PeerIndex rater) const
    {
        return std::span<const double>(counts_).subspan(rater * n_, n_);
    }

    void reward(PeerIndex rater, PeerIndex ratee);
    void punish(PeerIndex rater, PeerIndex ratee);

    friend bool operator==(const LocalOpinionLedger&, const LocalOpinionLedger&) = default;

private:
    friend class AccountabilityRegistry;
    void check(PeerIndex rater, PeerIndex ratee) const;
    double& cell(PeerIndex rater, PeerIndex ratee) { return counts_[rater * n_ + ratee]; }

    std::size_t n_;
    std::vector<double> counts_;
};

void record_reward(LocalOpinionLedger& ledger, PeerIndex rater, PeerIndex ratee);
void record_punishment(LocalOpinionLedger& ledger, PeerIndex rater, PeerIndex ratee);

/// Row-stochastic matrix c, row-major.
class NormalizedTrustMatrix {
public:
    NormalizedTrustMatrix() = default;
    NormalizedTrustMatrix(std::size_t n, std::vector<double> values);

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const
    {
        return std::span<const double>(c_).subspan(i * n_, n_);
    }
    const std::vector<double>& values() const { return c_; }

private:
    std::size_t n_ = 0;
    std::vector<double> c_;
};

/// c_dj = l_dj / sum_j l_dj. A peer that has rated nobody gets the uniform
/// row 1/n so that every row still sums to one.
NormalizedTrustMatrix normalize(const LocalOpinionLedger& ledger);

enum class ConvergenceStatus { Converged, MaxIterationsReached };

struct GlobalReputation {
    std::vector<double> g;
    std::size_t iterations = 0;
    double last_delta = 0.0;
    ConvergenceStatus status = ConvergenceStatus::Converged;

    bool converged() const { return status == ConvergenceStatus::Converged; }
};

/// Called after every synchronous step with the new vector and its L-inf move.
using StepObserver = std::function<void(std::size_t step, std::span<const double> g, double delta)>;

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr std::size_t kDefaultMaxIter = 1000;

/// Power iteration g <- c^T g from g0 until every component moves by less
/// than epsilon. Exhausting max_iter returns the last iterate flagged
/// MaxIterationsReached rather than throwing.
GlobalReputation compute_global(const NormalizedTrustMatrix& c, std::span<const double> g0,
                                double epsilon = kDefaultEpsilon,
                                std::size_t max_iter = kDefaultMaxIter,
                                const StepObserver& observer = {});

/// Reputation a newcomer starts with in a roster of n peers.
double admit_new_peer(std::size_t n);

/// `peer_index,goodness,global_reputation`
void write_reputation_csv(std::ostream& out, std::span<const double> goodness,
                          std::span<const double> g);

} // namespace coutile
