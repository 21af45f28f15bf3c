#include "coutile/trace.hpp"

#include <ostream>

namespace coutile {

std::string_view trace_kind_name(TraceKind k)
{
    switch (k) {
    case TraceKind::Hop: return "hop";
    case TraceKind::Submit: return "submit";
    case TraceKind::Discard: return "discard";
    case TraceKind::Refuse: return "refuse";
    case TraceKind::NoForwardee: return "no_forwardee";
    case TraceKind::HopCap: return "hop_cap";
    case TraceKind::Reverse: return "reverse";
    case TraceKind::Broken: return "broken";
    case TraceKind::Timeout: return "timeout";
    case TraceKind::Publish: return "publish";
    }
    return "unknown";
}

void TraceLog::write_csv(std::ostream& out, std::span<const Pseudonym> roster) const
{
    out << "iter,event,carrier,dest,hop_index\n";
    for (const auto& e : events_) {
        out << e.iteration << ',' << trace_kind_name(e.kind) << ','
            << roster[e.carrier].short_hex() << ',' << roster[e.dest].short_hex() << ','
            << e.hop_index << '\n';
    }
}

AnonymityAudit audit_anonymity(std::span<const TraceEvent> events,
                               const std::unordered_map<std::uint64_t, PeerIndex>& originators)
{
    AnonymityAudit audit;
    for (const auto& e : events) {
        ++audit.records;
        auto it = originators.find(e.message);
        if (it == originators.end())
            continue;
        const PeerIndex origin = it->second;
        if (e.carrier != origin && e.dest != origin)
            continue;
        // A forwardee cannot tell the originator from any other peer, so the
        // originator relaying its own message after a loop is indistinguishable.
        bool relayed_loop = e.carrier == origin && e.dest != origin && e.hop_index >= 2 &&
                            (e.kind == TraceKind::Hop || e.kind == TraceKind::Submit ||
                             e.kind == TraceKind::NoForwardee || e.kind == TraceKind::Discard ||
                             e.kind == TraceKind::HopCap);
        if (relayed_loop)
            ++audit.loopbacks;
        else
            ++audit.violations;
    }
    return audit;
}

} // namespace coutile
