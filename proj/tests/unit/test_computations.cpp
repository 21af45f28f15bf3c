#include "chi_square.hpp"

#include "coutile/computations.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace coutile;

namespace {

JointInput numbers(std::vector<std::int64_t> v)
{
    JointInput j;
    for (auto x : v)
        j.values.emplace_back(x);
    return j;
}

std::vector<std::int64_t> distinct_inputs(std::size_t m, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::int64_t> any(0, 999);
    std::vector<std::int64_t> v;
    while (v.size() < m) {
        auto x = any(rng);
        if (std::find(v.begin(), v.end(), x) == v.end())
            v.push_back(x);
    }
    return v;
}

// Oracles work on a descending sort; position 0 is the richest.
std::int64_t oracle_rank(std::vector<std::int64_t> v, std::int64_t own)
{
    std::sort(v.rbegin(), v.rend());
    return 1 + (std::find(v.begin(), v.end(), own) - v.begin());
}

NeighborDiffs oracle_diffs(std::vector<std::int64_t> v, std::int64_t own)
{
    std::sort(v.rbegin(), v.rend());
    auto pos = static_cast<std::size_t>(std::find(v.begin(), v.end(), own) - v.begin());
    NeighborDiffs d;
    if (pos > 0)
        d.diff_prev = v[pos - 1] - own;
    if (pos + 1 < v.size())
        d.diff_next = own - v[pos + 1];
    return d;
}

ComputationSpec with_own(ComputationSpec s, std::int64_t own)
{
    s.embedded_input = own;
    return s;
}

} // namespace

TEST(Rank, Examples)
{
    auto in = numbers({40, 10, 30, 20});
    EXPECT_EQ(eval_rank_of_input(in, 40), 1);
    EXPECT_EQ(eval_rank_of_input(in, 10), 4);
    EXPECT_EQ(eval_rank_of_input(in, 30), 2);
    EXPECT_THROW(eval_rank_of_input(in, 35), EvaluationError);
}

TEST(Rank, TiesShareTheBetterRank)
{
    auto in = numbers({5, 5, 3, 9});
    EXPECT_EQ(eval_rank_of_input(in, 5), 2);
    EXPECT_EQ(eval_rank_of_input(in, 3), 4);
    EXPECT_EQ(eval_rank_of_input(in, 9), 1);
}

TEST(Diffs, Examples)
{
    auto in = numbers({40, 10, 30, 20});
    auto top = eval_neighbor_diffs(in, 40);
    EXPECT_FALSE(top.diff_prev.has_value());
    EXPECT_EQ(top.diff_next, 10);
    auto mid = eval_neighbor_diffs(in, 20);
    EXPECT_EQ(mid.diff_prev, 10);
    EXPECT_EQ(mid.diff_next, 10);
    EXPECT_FALSE(eval_neighbor_diffs(in, 10).diff_next.has_value());
}

TEST(Tally, ExamplesAndInvalidBucket)
{
    JointInput in{{std::string("a"), std::string("b"), std::string("a"), std::string("zzz"),
                   std::int64_t{3}}};
    auto t = eval_vote_tally(in, {"a", "b", "c"});
    EXPECT_EQ(t.at("a"), 2);
    EXPECT_EQ(t.at("b"), 1);
    EXPECT_EQ(t.at("c"), 0);
    EXPECT_EQ(t.at(kInvalidBallot), 2);
    EXPECT_THROW(vote_tally_spec({"a", "invalid"}), std::invalid_argument);
}

TEST(Evaluate, MatchesBruteForceOnRandomInputs)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        auto v = distinct_inputs(4 + trial % 12, rng);
        auto in = numbers(v);
        for (auto own : v) {
            EXPECT_EQ(std::get<std::int64_t>(evaluate(with_own(rank_of_input_spec(), own), in)),
                      oracle_rank(v, own));
            EXPECT_EQ(std::get<NeighborDiffs>(evaluate(with_own(neighbor_diffs_spec(), own), in)),
                      oracle_diffs(v, own));
        }
    }
}

TEST(Evaluate, InvariantUnderInputOrder)
{
    std::mt19937_64 rng(22);
    std::vector<std::string> opts{"alpha", "beta", "gamma"};
    for (int trial = 0; trial < 200; ++trial) {
        auto v = distinct_inputs(10, rng);
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto spec = with_own(rank_of_input_spec(), v[3]);
        EXPECT_EQ(evaluate(spec, numbers(v)), evaluate(spec, numbers(shuffled)));

        JointInput ballots;
        for (int k = 0; k < 10; ++k)
            ballots.values.emplace_back(opts[rng() % 3]);
        auto t1 = evaluate(vote_tally_spec(opts), ballots);
        std::shuffle(ballots.values.begin(), ballots.values.end(), rng);
        EXPECT_EQ(t1, evaluate(vote_tally_spec(opts), ballots));
        std::int64_t total = 0;
        for (auto& [k, c] : std::get<Tally>(t1))
            total += c;
        EXPECT_EQ(total, 10);
    }
}

TEST(Evaluate, MissingEmbeddedInputRejected)
{
    EXPECT_THROW(evaluate(rank_of_input_spec(), numbers({1, 2, 3, 4})), EvaluationError);
    EXPECT_TRUE(requires_embedded_input(rank_of_input_spec()));
    EXPECT_TRUE(requires_embedded_input(neighbor_diffs_spec()));
    EXPECT_FALSE(requires_embedded_input(vote_tally_spec({"x"})));
}

TEST(Encoding, SpecRoundTrip)
{
    std::vector<ComputationSpec> specs{
        rank_of_input_spec(), with_own(neighbor_diffs_spec(), -5), vote_tally_spec({"y", "n"}),
        custom_spec("median", {{"k", "v"}})};
    auto s = vote_tally_spec({"y", "n"});
    s.embedded_input = std::string("y");
    specs.push_back(s);
    for (const auto& spec : specs)
        EXPECT_EQ(deserialize_spec(serialize(spec)), spec);
    auto bytes = serialize(specs[0]);
    bytes.push_back(0);
    EXPECT_THROW(deserialize_spec(bytes), DecodeError);
}

TEST(Encoding, OutputRoundTrip)
{
    std::vector<MaybeOutput> outs{std::nullopt, OutputValue{std::int64_t{7}},
                                  OutputValue{NeighborDiffs{std::nullopt, 12}},
                                  OutputValue{Tally{{"a", 3}, {"b", 1}}}};
    for (const auto& o : outs) {
        auto back = decode_maybe_output(encode_maybe_output(o));
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, o);
    }
    for (std::size_t i = 1; i < outs.size(); ++i)
        EXPECT_EQ(decode_output(canonical_encoding(*outs[i])), *outs[i]);
    EXPECT_FALSE(decode_maybe_output(Bytes{0xff, 0xff}).has_value());
}

TEST(Encoding, CanonicalOrderFollowsValue)
{
    EXPECT_LT(canonical_encoding(OutputValue{std::int64_t{-3}}),
              canonical_encoding(OutputValue{std::int64_t{2}}));
    EXPECT_LT(canonical_encoding(OutputValue{std::int64_t{2}}),
              canonical_encoding(OutputValue{std::int64_t{10}}));
}

TEST(RandomOutput, RankIsUniformOverDomain)
{
    std::mt19937_64 rng(23);
    auto in = numbers({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    auto spec = with_own(rank_of_input_spec(), 5);
    std::vector<double> counts(10, 0.0);
    for (int k = 0; k < 10000; ++k) {
        auto r = std::get<std::int64_t>(random_output(spec, in, rng));
        ASSERT_GE(r, 1);
        ASSERT_LE(r, 10);
        counts[static_cast<std::size_t>(r - 1)] += 1;
    }
    EXPECT_GT(testing_support::uniform_chi_square_p(counts), 0.001);
}

TEST(RandomOutput, TallyIsUniformOverCompositions)
{
    // 4 ballots over 3 options: C(6,2) = 15 compositions.
    std::mt19937_64 rng(24);
    auto spec = vote_tally_spec({"a", "b", "c"});
    JointInput in{{std::string("a"), std::string("a"), std::string("b"), std::string("c")}};
    std::map<Tally, double> seen;
    for (int k = 0; k < 15000; ++k) {
        auto t = std::get<Tally>(random_output(spec, in, rng));
        std::int64_t total = 0;
        for (auto& [name, c] : t) {
            EXPECT_GE(c, 0);
            total += c;
        }
        ASSERT_EQ(total, 4);
        seen[t] += 1;
    }
    ASSERT_EQ(seen.size(), 15u);
    std::vector<double> counts;
    for (auto& [t, c] : seen)
        counts.push_back(c);
    EXPECT_GT(testing_support::uniform_chi_square_p(counts), 0.001);
}

TEST(RandomOutput, DiffsStayInInputRange)
{
    std::mt19937_64 rng(25);
    auto in = numbers({100, 140, 170, 200});
    auto spec = with_own(neighbor_diffs_spec(), 140);
    for (int k = 0; k < 1000; ++k) {
        auto d = std::get<NeighborDiffs>(random_output(spec, in, rng));
        ASSERT_TRUE(d.diff_prev && d.diff_next);
        EXPECT_GE(*d.diff_prev, 0);
        EXPECT_LE(*d.diff_prev, 100);
        EXPECT_GE(*d.diff_next, 0);
        EXPECT_LE(*d.diff_next, 100);
    }
}

TEST(Custom, RegisteredComputationDispatches)
{
    CustomComputation sum;
    sum.evaluate = [](const ComputationSpec&, const JointInput& in) {
        std::int64_t s = 0;
        for (auto& v : in.values)
            s += std::get<std::int64_t>(v);
        return OutputValue{s};
    };
    sum.random_output = [](const ComputationSpec&, const JointInput&, std::mt19937_64& rng) {
        return OutputValue{static_cast<std::int64_t>(rng() % 100)};
    };
    register_computation("sum", sum);
    EXPECT_TRUE(is_registered("sum"));
    EXPECT_FALSE(requires_embedded_input(custom_spec("sum")));
    EXPECT_EQ(std::get<std::int64_t>(evaluate(custom_spec("sum"), numbers({1, 2, 3, 4}))), 10);
    EXPECT_THROW(evaluate(custom_spec("nope"), numbers({1})), EvaluationError);
    EXPECT_THROW(register_computation("bad", CustomComputation{}), std::invalid_argument);
}
