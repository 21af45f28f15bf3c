#pragma once

#include "coutile/reputation.hpp"

#include <cstdint>
#include <vector>

namespace coutile {

/// Custody of local-opinion rows by accountability managers (AMs).
///
/// Row i of the opinion matrix is held by each of peer i's M managers; each
/// manager keeps its own copy, so one AM may hold a value the others do not
/// (e.g. a forged reward commitment it rejected). Global reputation reads the
/// per-cell median of the copies, which is the majority value whenever a
/// majority of a peer's AMs agree. With M = 0 the peer keeps its own row.
class AccountabilityRegistry {
public:
    struct AuditPunishment {
        PeerIndex manager;
        PeerIndex client;
        std::uint64_t iteration;
    };

    AccountabilityRegistry() = default;
    AccountabilityRegistry(std::size_t peers, std::vector<std::vector<PeerIndex>> managers);

    std::size_t peers() const { return n_; }
    const std::vector<PeerIndex>& managers_of(PeerIndex p) const { return managers_.at(p); }
    bool is_manager_of(PeerIndex am, PeerIndex pupil) const;

    // Applied by every custodian of rater's row.
    void reward(PeerIndex rater, PeerIndex ratee);
    void punish(PeerIndex rater, PeerIndex ratee);

    // Applied by one custodian only; `am` must manage `rater`.
    void reward_held_by(PeerIndex am, PeerIndex rater, PeerIndex ratee);
    double held_by(PeerIndex am, PeerIndex rater, PeerIndex ratee) const;

    /// Manager `am` punishes `client` in its own opinion row (so the change
    /// lands at am's custodians) and the event is logged.
    void audit_punish(PeerIndex am, PeerIndex client, std::uint64_t iteration);
    const std::vector<AuditPunishment>& audit_log() const { return audit_log_; }

    LocalOpinionLedger consensus() const;

private:
    std::size_t slot_of(PeerIndex am, PeerIndex rater) const;

    std::size_t n_ = 0;
    std::vector<std::vector<PeerIndex>> managers_;
    // replicas_[k] row i is the copy held by the k-th manager of peer i.
    std::vector<LocalOpinionLedger> replicas_;
    std::vector<AuditPunishment> audit_log_;
};

} // namespace coutile
