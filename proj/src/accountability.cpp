#include "coutile/accountability.hpp"

#include <algorithm>
#include <stdexcept>

namespace coutile {

AccountabilityRegistry::AccountabilityRegistry(std::size_t peers,
                                               std::vector<std::vector<PeerIndex>> managers)
    : n_(peers), managers_(std::move(managers))
{
    if (managers_.size() != n_)
        throw std::invalid_argument("one manager list per peer required");
    std::size_t m = 0;
    for (PeerIndex p = 0; p < n_; ++p) {
        const auto& list = managers_[p];
        if (p > 0 && list.size() != m)
            throw std::invalid_argument("every peer must have the same number of managers");
        m = list.size();
        for (auto am : list)
            if (am >= n_ || am == p)
                throw std::invalid_argument("invalid accountability manager");
    }
    replicas_.assign(std::max<std::size_t>(m, 1), LocalOpinionLedger(n_));
}

bool AccountabilityRegistry::is_manager_of(PeerIndex am, PeerIndex pupil) const
{
    const auto& list = managers_.at(pupil);
    return std::find(list.begin(), list.end(), am) != list.end();
}

std::size_t AccountabilityRegistry::slot_of(PeerIndex am, PeerIndex rater) const
{
    const auto& list = managers_.at(rater);
    auto it = std::find(list.begin(), list.end(), am);
    if (it == list.end())
        throw std::invalid_argument("peer does not manage this rater");
    return static_cast<std::size_t>(it - list.begin());
}

void AccountabilityRegistry::reward(PeerIndex rater, PeerIndex ratee)
{
    for (auto& r : replicas_)
        r.reward(rater, ratee);
}

void AccountabilityRegistry::punish(PeerIndex rater, PeerIndex ratee)
{
    for (auto& r : replicas_)
        r.punish(rater, ratee);
}

void AccountabilityRegistry::reward_held_by(PeerIndex am, PeerIndex rater, PeerIndex ratee)
{
    replicas_[slot_of(am, rater)].reward(rater, ratee);
}

double AccountabilityRegistry::held_by(PeerIndex am, PeerIndex rater, PeerIndex ratee) const
{
    return replicas_[slot_of(am, rater)].at(rater, ratee);
}

void AccountabilityRegistry::audit_punish(PeerIndex am, PeerIndex client, std::uint64_t iteration)
{
    if (!is_manager_of(am, client))
        throw std::invalid_argument("only a client's own managers audit it");
    punish(am, client);
    audit_log_.push_back({am, client, iteration});
}

LocalOpinionLedger AccountabilityRegistry::consensus() const
{
    if (replicas_.size() == 1)
        return replicas_.front();
    LocalOpinionLedger out(n_);
    std::vector<double> column(replicas_.size());
    const auto mid = column.size() / 2;
    for (std::size_t cell = 0; cell < n_ * n_; ++cell) {
        for (std::size_t k = 0; k < replicas_.size(); ++k)
            column[k] = replicas_[k].counts_[cell];
        std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid), column.end());
        double v = column[mid];
        if (column.size() % 2 == 0) {
            double lower = *std::max_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid));
            v = 0.5 * (v + lower);
        }
        out.counts_[cell] = v;
    }
    return out;
}

} // namespace coutile
