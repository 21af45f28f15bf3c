#pragma once

#include "coutile/identity.hpp"
#include "coutile/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coutile {

enum class TraceKind {
    Hop,             // carrier accepted the message from the previous holder
    Submit,          // carrier handed the message to the destination worker
    Discard,         // carrier dropped a message from a low-reputation sender
    Refuse,          // worker (carrier) refused a computation
    NoForwardee,     // Select found nobody; carrier submits directly instead
    HopCap,          // hop cap reached; carrier submits directly
    Reverse,         // carrier passed an output back to dest
    Broken,          // reverse path link missing at carrier
    Timeout,         // worker deadline: pending computation returned nil
    Publish,         // worker posted an output to the public bulletin
};

std::string_view trace_kind_name(TraceKind k);

/// One channel event. Only `carrier` and `dest` are peer-visible; `message`
/// is simulator bookkeeping and never written out.
struct TraceEvent {
    std::uint64_t iteration = 0;
    TraceKind kind = TraceKind::Hop;
    PeerIndex carrier = 0;
    PeerIndex dest = 0;
    std::uint32_t hop_index = 0;
    std::uint64_t message = 0;
};

class TraceLog {
public:
    void record(const TraceEvent& e) { events_.push_back(e); }
    const std::vector<TraceEvent>& events() const { return events_; }
    void clear() { events_.clear(); }

    /// `iter,event,carrier,dest,hop_index` with short-hex pseudonyms.
    void write_csv(std::ostream& out, std::span<const Pseudonym> roster) const;

private:
    std::vector<TraceEvent> events_;
};

struct AnonymityAudit {
    std::size_t records = 0;
    // Records that expose a message's originator in that role: as the
    // sender of a direct submission, or as the target of a reverse hop.
    std::size_t violations = 0;
    // Records where a forwardee handed the originator its own message back
    // and it relayed it like any other forwardee. Not counted as violations.
    std::size_t loopbacks = 0;
};

/// Cross-checks every record against the simulator-private originator map.
AnonymityAudit audit_anonymity(std::span<const TraceEvent> events,
                               const std::unordered_map<std::uint64_t, PeerIndex>& originators);

} // namespace coutile
