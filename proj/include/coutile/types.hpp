#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace coutile {

/// Roster slot of a peer. The roster is an ordered, run-frozen list of
/// pseudonyms, so an index is a handle on a pseudonym, never on a real identity.
using PeerIndex = std::size_t;

using Rng = std::mt19937_64;

} // namespace coutile
