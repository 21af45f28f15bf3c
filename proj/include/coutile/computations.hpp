#pragma once

#include "coutile/bytes.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace coutile {

/// A client's private input: a number (rankings, auctions) or a category (ballots).
using InputValue = std::variant<std::int64_t, std::string>;

/// The m inputs a worker has collected, in arrival order. Carries no client
/// identifiers.
struct JointInput {
    std::vector<InputValue> values;
};

struct NeighborDiffs {
    std::optional<std::int64_t> diff_prev; // richer neighbour minus own; empty at the top
    std::optional<std::int64_t> diff_next; // own minus poorer neighbour; empty at the bottom

    friend bool operator==(const NeighborDiffs&, const NeighborDiffs&) = default;
};

using Tally = std::map<std::string, std::int64_t>;

using OutputValue = std::variant<std::int64_t, NeighborDiffs, Tally>;
/// nullopt is the protocol's `nil` output.
using MaybeOutput = std::optional<OutputValue>;

/// Deterministic encoding; majority ties break towards the smallest encoding.
Bytes canonical_encoding(const OutputValue& v);
std::optional<OutputValue> decode_output(ByteView data);
Bytes encode_maybe_output(const MaybeOutput& v);
std::optional<MaybeOutput> decode_maybe_output(ByteView data);

Bytes encode_input(const InputValue& v);
InputValue decode_input(ByteReader& r);

enum class ComputationKind : std::uint8_t {
    RankOfInput = 1,
    NeighborDiffs = 2,
    VoteTally = 3,
    Custom = 4,
};

/// Reserved tally bucket for ballots that name no listed option.
inline constexpr const char* kInvalidBallot = "invalid";

/// Declarative joint computation. `embedded_input` is present exactly when
/// the computation must know which input is the requesting client's.
///
/// Wire layout (big-endian):
///   kind:u8  embedded_flag:u8  [embedded_value]  param_count:u16
///   { key:str16  value:str16 } * param_count
/// where embedded_value is tag:u8 (1 = i64, 2 = str16) followed by the value.
struct ComputationSpec {
    ComputationKind kind = ComputationKind::RankOfInput;
    std::optional<InputValue> embedded_input;
    std::map<std::string, std::string> params;

    friend bool operator==(const ComputationSpec&, const ComputationSpec&) = default;
};

Bytes serialize(const ComputationSpec& spec);
ComputationSpec deserialize_spec(ByteView data);

ComputationSpec rank_of_input_spec();
ComputationSpec neighbor_diffs_spec();
ComputationSpec vote_tally_spec(const std::vector<std::string>& options);
ComputationSpec custom_spec(const std::string& name, std::map<std::string, std::string> params = {});
std::vector<std::string> tally_options(const ComputationSpec& spec);

/// Whether client i's pruned computation must carry I_i.
bool requires_embedded_input(const ComputationSpec& spec);

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::int64_t eval_rank_of_input(const JointInput& inputs, std::int64_t own);
NeighborDiffs eval_neighbor_diffs(const JointInput& inputs, std::int64_t own);
Tally eval_vote_tally(const JointInput& inputs, const std::vector<std::string>& options);

/// Pure dispatch on spec.kind.
OutputValue evaluate(const ComputationSpec& spec, const JointInput& inputs);

/// A value drawn uniformly from the computation's output domain, independent
/// of the true output. Used to model a dishonest worker.
OutputValue random_output(const ComputationSpec& spec, const JointInput& inputs, std::mt19937_64& rng);

/// User-registered computations, addressed by ComputationSpec::params["name"].
struct CustomComputation {
    std::function<OutputValue(const ComputationSpec&, const JointInput&)> evaluate;
    std::function<OutputValue(const ComputationSpec&, const JointInput&, std::mt19937_64&)> random_output;
    bool needs_embedded_input = false;
};

void register_computation(const std::string& name, CustomComputation computation);
bool is_registered(const std::string& name);

} // namespace coutile
