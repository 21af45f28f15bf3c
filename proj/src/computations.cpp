#include "coutile/computations.hpp"

#include <algorithm>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace coutile {

namespace {

enum : std::uint8_t { kOutRank = 1, kOutDiffs = 2, kOutTally = 3 };
enum : std::uint8_t { kInInt = 1, kInStr = 2 };

struct Registry {
    std::shared_mutex mu;
    std::unordered_map<std::string, CustomComputation> entries;
};

Registry& registry()
{
    static Registry r;
    return r;
}

const CustomComputation& lookup(const ComputationSpec& spec)
{
    auto it = spec.params.find("name");
    if (it == spec.params.end())
        throw EvaluationError("custom computation without a name");
    auto& r = registry();
    std::shared_lock lock(r.mu);
    auto found = r.entries.find(it->second);
    if (found == r.entries.end())
        throw EvaluationError("unregistered computation: " + it->second);
    return found->second;
}

std::vector<std::int64_t> numeric(const JointInput& inputs)
{
    std::vector<std::int64_t> out;
    out.reserve(inputs.values.size());
    for (const auto& v : inputs.values) {
        if (!std::holds_alternative<std::int64_t>(v))
            throw EvaluationError("computation expects numeric inputs");
        out.push_back(std::get<std::int64_t>(v));
    }
    return out;
}

std::int64_t embedded_number(const ComputationSpec& spec)
{
    if (!spec.embedded_input || !std::holds_alternative<std::int64_t>(*spec.embedded_input))
        throw EvaluationError("computation needs the client's numeric input embedded");
    return std::get<std::int64_t>(*spec.embedded_input);
}

} // namespace

Bytes canonical_encoding(const OutputValue& v)
{
    ByteWriter w;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                w.u8(kOutRank).i64(x);
            } else if constexpr (std::is_same_v<T, NeighborDiffs>) {
                w.u8(kOutDiffs);
                w.u8(x.diff_prev ? 1 : 0);
                if (x.diff_prev)
                    w.i64(*x.diff_prev);
                w.u8(x.diff_next ? 1 : 0);
                if (x.diff_next)
                    w.i64(*x.diff_next);
            } else {
                w.u8(kOutTally).u16(static_cast<std::uint16_t>(x.size()));
                for (const auto& [option, count] : x)
                    w.str(option).i64(count);
            }
        },
        v);
    return std::move(w).bytes();
}

std::optional<OutputValue> decode_output(ByteView data)
{
    try {
        ByteReader r(data);
        OutputValue out;
        switch (r.u8()) {
        case kOutRank:
            out = r.i64();
            break;
        case kOutDiffs: {
            NeighborDiffs d;
            if (r.u8())
                d.diff_prev = r.i64();
            if (r.u8())
                d.diff_next = r.i64();
            out = d;
            break;
        }
        case kOutTally: {
            Tally t;
            auto count = r.u16();
            for (std::uint16_t i = 0; i < count; ++i) {
                auto key = r.str();
                t[key] = r.i64();
            }
            out = std::move(t);
            break;
        }
        default:
            return std::nullopt;
        }
        if (!r.done())
            return std::nullopt;
        return out;
    } catch (const DecodeError&) {
        return std::nullopt;
    }
}

Bytes encode_maybe_output(const MaybeOutput& v)
{
    Bytes out{static_cast<std::uint8_t>(v ? 1 : 0)};
    if (v) {
        auto body = canonical_encoding(*v);
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

std::optional<MaybeOutput> decode_maybe_output(ByteView data)
{
    if (data.empty())
        return std::nullopt;
    if (data[0] == 0)
        return data.size() == 1 ? std::optional<MaybeOutput>(MaybeOutput{}) : std::nullopt;
    auto v = decode_output(data.subspan(1));
    if (!v)
        return std::nullopt;
    return MaybeOutput{std::move(*v)};
}

Bytes encode_input(const InputValue& v)
{
    ByteWriter w;
    if (const auto* i = std::get_if<std::int64_t>(&v))
        w.u8(kInInt).i64(*i);
    else
        w.u8(kInStr).str(std::get<std::string>(v));
    return std::move(w).bytes();
}

InputValue decode_input(ByteReader& r)
{
    switch (r.u8()) {
    case kInInt:
        return r.i64();
    case kInStr:
        return r.str();
    default:
        throw DecodeError("unknown input tag");
    }
}

Bytes serialize(const ComputationSpec& spec)
{
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(spec.kind));
    w.u8(spec.embedded_input ? 1 : 0);
    if (spec.embedded_input)
        w.raw(encode_input(*spec.embedded_input));
    w.u16(static_cast<std::uint16_t>(spec.params.size()));
    for (const auto& [k, v] : spec.params)
        w.str(k).str(v);
    return std::move(w).bytes();
}

ComputationSpec deserialize_spec(ByteView data)
{
    ByteReader r(data);
    ComputationSpec spec;
    auto kind = r.u8();
    if (kind < 1 || kind > 4)
        throw DecodeError("unknown computation kind");
    spec.kind = static_cast<ComputationKind>(kind);
    auto flag = r.u8();
    if (flag > 1)
        throw DecodeError("bad embedded flag");
    if (flag)
        spec.embedded_input = decode_input(r);
    auto count = r.u16();
    for (std::uint16_t i = 0; i < count; ++i) {
        auto k = r.str();
        spec.params[k] = r.str();
    }
    if (!r.done())
        throw DecodeError("trailing bytes after computation spec");
    return spec;
}

ComputationSpec rank_of_input_spec()
{
    return ComputationSpec{ComputationKind::RankOfInput, std::nullopt, {}};
}

ComputationSpec neighbor_diffs_spec()
{
    return ComputationSpec{ComputationKind::NeighborDiffs, std::nullopt, {}};
}

ComputationSpec vote_tally_spec(const std::vector<std::string>& options)
{
    std::string joined;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (options[i].empty() || options[i].find('\n') != std::string::npos)
            throw std::invalid_argument("ballot options must be nonempty single-line strings");
        if (options[i] == kInvalidBallot)
            throw std::invalid_argument("\"invalid\" is a reserved tally bucket");
        if (i)
            joined.push_back('\n');
        joined += options[i];
    }
    return ComputationSpec{ComputationKind::VoteTally, std::nullopt, {{"options", joined}}};
}

ComputationSpec custom_spec(const std::string& name, std::map<std::string, std::string> params)
{
    params["name"] = name;
    return ComputationSpec{ComputationKind::Custom, std::nullopt, std::move(params)};
}

std::vector<std::string> tally_options(const ComputationSpec& spec)
{
    auto it = spec.params.find("options");
    if (it == spec.params.end() || it->second.empty())
        throw EvaluationError("vote tally without options");
    std::vector<std::string> out;
    std::istringstream in(it->second);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

bool requires_embedded_input(const ComputationSpec& spec)
{
    switch (spec.kind) {
    case ComputationKind::RankOfInput:
    case ComputationKind::NeighborDiffs:
        return true;
    case ComputationKind::VoteTally:
        return false;
    case ComputationKind::Custom:
        return lookup(spec).needs_embedded_input;
    }
    return false;
}

std::int64_t eval_rank_of_input(const JointInput& inputs, std::int64_t own)
{
    auto values = numeric(inputs);
    if (std::find(values.begin(), values.end(), own) == values.end())
        throw EvaluationError("own input is not among the joint inputs");
    auto greater = std::count_if(values.begin(), values.end(), [own](auto v) { return v > own; });
    return 1 + static_cast<std::int64_t>(greater);
}

NeighborDiffs eval_neighbor_diffs(const JointInput& inputs, std::int64_t own)
{
    auto values = numeric(inputs);
    auto self = std::find(values.begin(), values.end(), own);
    if (self == values.end())
        throw EvaluationError("own input is not among the joint inputs");
    values.erase(self);

    NeighborDiffs out;
    for (auto v : values) {
        if (v >= own && (!out.diff_prev || v - own < *out.diff_prev))
            out.diff_prev = v - own;
        if (v <= own && (!out.diff_next || own - v < *out.diff_next))
            out.diff_next = own - v;
    }
    return out;
}

Tally eval_vote_tally(const JointInput& inputs, const std::vector<std::string>& options)
{
    Tally t;
    for (const auto& o : options)
        t[o] = 0;
    for (const auto& v : inputs.values) {
        const auto* ballot = std::get_if<std::string>(&v);
        auto it = ballot ? t.find(*ballot) : t.end();
        if (it != t.end())
            ++it->second;
        else
            ++t[kInvalidBallot];
    }
    return t;
}

OutputValue evaluate(const ComputationSpec& spec, const JointInput& inputs)
{
    switch (spec.kind) {
    case ComputationKind::RankOfInput:
        return eval_rank_of_input(inputs, embedded_number(spec));
    case ComputationKind::NeighborDiffs:
        return eval_neighbor_diffs(inputs, embedded_number(spec));
    case ComputationKind::VoteTally:
        return eval_vote_tally(inputs, tally_options(spec));
    case ComputationKind::Custom:
        return lookup(spec).evaluate(spec, inputs);
    }
    throw EvaluationError("malformed computation spec");
}

OutputValue random_output(const ComputationSpec& spec, const JointInput& inputs, std::mt19937_64& rng)
{
    const auto m = static_cast<std::int64_t>(inputs.values.size());
    switch (spec.kind) {
    case ComputationKind::RankOfInput: {
        std::uniform_int_distribution<std::int64_t> rank(1, std::max<std::int64_t>(m, 1));
        return rank(rng);
    }
    case ComputationKind::NeighborDiffs: {
        auto values = numeric(inputs);
        std::int64_t span = 0;
        if (!values.empty()) {
            auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            span = *hi - *lo;
        }
        std::uniform_int_distribution<std::int64_t> diff(0, span);
        NeighborDiffs d;
        d.diff_prev = diff(rng);
        d.diff_next = diff(rng);
        return d;
    }
    case ComputationKind::VoteTally: {
        // Uniform composition of m ballots over the options (stars and bars).
        auto options = tally_options(spec);
        const auto k = static_cast<std::int64_t>(options.size());
        std::vector<std::int64_t> slots(static_cast<std::size_t>(m + k - 1));
        for (std::size_t i = 0; i < slots.size(); ++i)
            slots[i] = static_cast<std::int64_t>(i);
        std::vector<std::int64_t> bars;
        std::sample(slots.begin(), slots.end(), std::back_inserter(bars), k - 1, rng);
        Tally t;
        std::int64_t prev = -1;
        for (std::int64_t i = 0; i < k; ++i) {
            std::int64_t bar = i + 1 < k ? bars[static_cast<std::size_t>(i)] : m + k - 1;
            t[options[static_cast<std::size_t>(i)]] = bar - prev - 1;
            prev = bar;
        }
        return t;
    }
    case ComputationKind::Custom:
        return lookup(spec).random_output(spec, inputs, rng);
    }
    throw EvaluationError("malformed computation spec");
}

void register_computation(const std::string& name, CustomComputation computation)
{
    if (!computation.evaluate || !computation.random_output)
        throw std::invalid_argument("custom computation needs evaluate and random_output");
    auto& r = registry();
    std::unique_lock lock(r.mu);
    r.entries[name] = std::move(computation);
}

bool is_registered(const std::string& name)
{
    auto& r = registry();
    std::shared_lock lock(r.mu);
    return r.entries.count(name) > 0;
}

} // namespace coutile
