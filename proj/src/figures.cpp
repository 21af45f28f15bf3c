#include "coutile/figures.hpp"

#include "coutile/reputation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace coutile {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void open_csv(std::ofstream& f, const std::filesystem::path& p)
{
    f.open(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
}

} // namespace

void write_fig1(std::ostream& out, const RunMetrics& m)
{
    out << "peer_index,goodness,final_reputation\n";
    for (std::size_t i = 0; i < m.final_reputation.size(); ++i)
        out << i << ',' << num(m.goodness[i]) << ',' << num(m.final_reputation[i]) << '\n';
}

std::vector<RateRow> rate_rows(const RunMetrics& m, std::size_t last)
{
    const std::size_t n = m.final_reputation.size();
    std::vector<std::size_t> requests(n, 0), correct(n, 0);
    const std::uint64_t from = (last > 0 && m.iterations > last) ? m.iterations - last + 1 : 1;
    for (const auto& r : m.requests) {
        if (r.iteration < from)
            continue;
        ++requests[r.client];
        if (r.correct)
            ++correct[r.client];
    }
    std::vector<RateRow> rows;
    for (PeerIndex p = 0; p < n; ++p) {
        if (requests[p] == 0)
            continue;
        rows.push_back({p, m.final_reputation[p], requests[p], correct[p],
                        static_cast<double>(correct[p]) / static_cast<double>(requests[p])});
    }
    return rows;
}

void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows)
{
    out << "peer_index,final_reputation,requests,correct,rate\n";
    for (const auto& r : rows)
        out << r.peer << ',' << num(r.final_reputation) << ',' << r.requests << ',' << r.correct
            << ',' << num(r.rate) << '\n';
}

QuartileRates quartile_rates(std::vector<RateRow> rows)
{
    QuartileRates q;
    if (rows.empty())
        return q;
    std::stable_sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) {
        return a.final_reputation > b.final_reputation;
    });
    q.size = std::max<std::size_t>(1, rows.size() / 4);
    double top = 0, bottom = 0;
    for (std::size_t k = 0; k < q.size; ++k) {
        top += rows[k].rate;
        bottom += rows[rows.size() - 1 - k].rate;
    }
    q.top = top / static_cast<double>(q.size);
    q.bottom = bottom / static_cast<double>(q.size);
    return q;
}

void write_reputation(std::ostream& out, const RunMetrics& m)
{
    write_reputation_csv(out, m.goodness, m.final_reputation);
}

void write_requests(std::ostream& out, const RunMetrics& m)
{
    out << "iteration,client,reputation,correct\n";
    for (const auto& r : m.requests)
        out << r.iteration << ',' << r.client << ',' << num(r.reputation) << ','
            << (r.correct ? 1 : 0) << '\n';
}

std::vector<SweepRow> run_sweep(const SimConfig& base, const std::vector<double>& fracs,
                                const std::vector<Mode>& modes,
                                const std::vector<std::uint64_t>& seeds)
{
    std::vector<SweepRow> rows;
    for (double frac : fracs) {
        for (Mode mode : modes) {
            std::size_t req[3] = {0, 0, 0}, ok[3] = {0, 0, 0}; // good, bad, all
            for (auto seed : seeds) {
                SimConfig cfg = base;
                cfg.malicious_frac = frac;
                cfg.mode = mode;
                cfg.seed = seed;
                auto m = run_simulation(cfg);
                for (const auto& r : m.requests) {
                    const int cls = m.goodness[r.client] >= 0.5 ? 0 : 1;
                    ++req[cls];
                    ++req[2];
                    if (r.correct) {
                        ++ok[cls];
                        ++ok[2];
                    }
                }
            }
            static const char* names[3] = {"good", "bad", "all"};
            for (int c = 0; c < 3; ++c) {
                if (req[c] == 0)
                    continue;
                rows.push_back({frac, mode, names[c],
                                static_cast<double>(ok[c]) / static_cast<double>(req[c]), req[c]});
            }
        }
    }
    return rows;
}

void write_fig4(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "malicious_frac,mode,client_class,rate\n";
    for (const auto& r : rows)
        out << num(r.malicious_frac) << ',' << mode_name(r.mode) << ',' << r.client_class << ','
            << num(r.rate) << '\n';
}

void write_run_outputs(const std::string& dir, const RunMetrics& m, bool with_requests)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream f;
    open_csv(f, fs::path(dir) / "fig1.csv");
    write_fig1(f, m);
    f.close();
    open_csv(f, fs::path(dir) / "fig2.csv");
    write_rate_csv(f, rate_rows(m));
    f.close();
    open_csv(f, fs::path(dir) / "fig3.csv");
    write_rate_csv(f, rate_rows(m, 100));
    f.close();
    open_csv(f, fs::path(dir) / "reputation.csv");
    write_reputation(f, m);
    f.close();
    if (with_requests) {
        open_csv(f, fs::path(dir) / "requests.csv");
        write_requests(f, m);
    }
}

} // namespace coutile
