#pragma once

#include "coutile/bytes.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coutile {

/// Raised when a structural parameter cannot be honoured (roster too
/// small, too few clients, and so on).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Public identity of a peer. Opaque bytes, unique across a roster.
struct RealId {
    Bytes value;

    friend bool operator==(const RealId&, const RealId&) = default;
};

/// Pseudonym P = H(id, nonce). Peers address each other by pseudonym only.
struct Pseudonym {
    std::array<std::uint8_t, 32> digest{};

    std::string hex() const { return to_hex(digest); }
    // First 8 bytes in hex; enough to tell peers apart in logs.
    std::string short_hex() const { return to_hex(ByteView(digest).first(8)); }

    friend auto operator<=>(const Pseudonym&, const Pseudonym&) = default;
};

Pseudonym derive_pseudonym(const RealId& id, ByteView nonce);

/// True iff revealing (id, nonce) reproduces p.
bool prove_pseudonym(const RealId& id, ByteView nonce, const Pseudonym& p);

/// The M accountability managers of one peer, as indices into the roster the
/// assignment was computed against.
struct AmAssignment {
    Pseudonym subject;
    std::vector<std::size_t> managers;
};

/// Managers are drawn by hashing the subject: index_k = H(p || k) mod |roster|
/// for k = 0, 1, 2, ..., skipping repeats and the subject itself. The result
/// depends only on (p, roster order, M); reordering or growing the roster
/// changes it, so rosters are frozen for the lifetime of a run.
AmAssignment assign_accountability_managers(const Pseudonym& p,
                                            const std::vector<Pseudonym>& roster,
                                            std::size_t managers);

} // namespace coutile
