#include "coutile/figures.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace coutile;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

// Four peers, three iterations, two clients per iteration.
RunMetrics toy()
{
    RunMetrics m;
    m.iterations = 3;
    m.goodness = {1, 1, 0, 1};
    m.final_reputation = {0.4, 0.3, 0.1, 0.2};
    m.requests = {{1, 0, 0.25, true}, {1, 2, 0.25, false}, {2, 0, 0.3, true},
                  {2, 1, 0.3, true},  {3, 2, 0.2, true},   {3, 1, 0.3, false}};
    return m;
}

SimConfig small()
{
    SimConfig c;
    c.peers = 24;
    c.clients = 6;
    c.iterations = 120;
    return c;
}

} // namespace

TEST(Fig1, OneRowPerPeer)
{
    std::ostringstream out;
    write_fig1(out, toy());
    auto l = lines(out.str());
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(l[0], "peer_index,goodness,final_reputation");
    EXPECT_EQ(l[3], "2,0,0.1");
}

TEST(RateRows, CountsAndWindow)
{
    auto all = rate_rows(toy());
    ASSERT_EQ(all.size(), 3u); // peer 3 never requested
    EXPECT_EQ(all[0].peer, 0u);
    EXPECT_EQ(all[0].requests, 2u);
    EXPECT_DOUBLE_EQ(all[0].rate, 1.0);
    EXPECT_DOUBLE_EQ(all[1].rate, 0.5);
    EXPECT_DOUBLE_EQ(all[2].rate, 0.5);

    auto last = rate_rows(toy(), 1);
    ASSERT_EQ(last.size(), 2u);
    EXPECT_EQ(last[0].peer, 1u);
    EXPECT_DOUBLE_EQ(last[0].rate, 0.0);
    EXPECT_DOUBLE_EQ(last[1].rate, 1.0);
}

TEST(RateRows, CsvHeader)
{
    std::ostringstream out;
    write_rate_csv(out, rate_rows(toy()));
    auto l = lines(out.str());
    EXPECT_EQ(l[0], "peer_index,final_reputation,requests,correct,rate");
    EXPECT_EQ(l[1], "0,0.4,2,2,1");
}

TEST(Quartiles, TopAndBottomByReputation)
{
    std::vector<RateRow> rows;
    for (PeerIndex p = 0; p < 8; ++p)
        rows.push_back({p, 0.01 * static_cast<double>(p), 4, p, static_cast<double>(p) / 10});
    auto q = quartile_rates(rows);
    EXPECT_EQ(q.size, 2u);
    EXPECT_DOUBLE_EQ(q.top, 0.65);
    EXPECT_DOUBLE_EQ(q.bottom, 0.05);
}

TEST(Requests, Schema)
{
    std::ostringstream out;
    write_requests(out, toy());
    auto l = lines(out.str());
    ASSERT_EQ(l.size(), 7u);
    EXPECT_EQ(l[0], "iteration,client,reputation,correct");
    EXPECT_EQ(l[2], "1,2,0.25,0");
}

TEST(RunOutputs, FilesAndSums)
{
    auto cfg = small();
    auto m = run_simulation(cfg);
    auto dir = std::filesystem::temp_directory_path() / "coutile_fig_test";
    std::filesystem::remove_all(dir);
    write_run_outputs(dir.string(), m, true);
    for (const char* f : {"fig1.csv", "fig2.csv", "fig3.csv", "reputation.csv", "requests.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;

    EXPECT_NEAR(std::accumulate(m.final_reputation.begin(), m.final_reputation.end(), 0.0), 1.0, 1e-9);
    std::size_t total = 0, window = 0;
    for (const auto& r : rate_rows(m)) {
        EXPECT_GE(r.rate, 0.0);
        EXPECT_LE(r.rate, 1.0);
        total += r.requests;
    }
    for (const auto& r : rate_rows(m, 100))
        window += r.requests;
    EXPECT_EQ(total, cfg.clients * cfg.iterations);
    EXPECT_EQ(window, cfg.clients * 100);

    std::ifstream f(dir / "fig1.csv", std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(f)), {});
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(lines(text).size(), cfg.peers + 1);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, RowsPerGridPointAndClass)
{
    SimConfig cfg;
    cfg.iterations = 20;
    auto rows = run_sweep(cfg, {0.0, 0.25}, {Mode::Rational, Mode::Baseline}, {1});
    // frac 0 has no bad clients.
    ASSERT_EQ(rows.size(), 2u * 2u + 2u * 3u);
    for (const auto& r : rows) {
        EXPECT_GE(r.rate, 0.0);
        EXPECT_LE(r.rate, 1.0);
        if (r.malicious_frac == 0.0) {
            EXPECT_GE(r.rate, 0.99);
        }
    }
    std::ostringstream out;
    write_fig4(out, rows);
    auto l = lines(out.str());
    EXPECT_EQ(l[0], "malicious_frac,mode,client_class,rate");
    EXPECT_EQ(l.size(), rows.size() + 1);
}
