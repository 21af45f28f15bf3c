#pragma once

#include "coutile/config.hpp"
#include "coutile/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace coutile {

/// `peer_index,goodness,final_reputation`
void write_fig1(std::ostream& out, const RunMetrics& metrics);

struct RateRow {
    PeerIndex peer = 0;
    double final_reputation = 0.0;
    std::size_t requests = 0;
    std::size_t correct = 0;
    double rate = 0.0;
};

/// Per-client correct-output rates. `last` > 0 keeps only the last `last`
/// iterations. Peers that never requested are omitted.
std::vector<RateRow> rate_rows(const RunMetrics& metrics, std::size_t last = 0);

/// `peer_index,final_reputation,requests,correct,rate`
void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows);

/// Mean per-peer rate of the top and bottom quarter of rows ranked by final
/// reputation (roster index breaks ties).
struct QuartileRates {
    double top = 0.0;
    double bottom = 0.0;
    std::size_t size = 0;
};
QuartileRates quartile_rates(std::vector<RateRow> rows);

/// `peer_index,goodness,global_reputation` (reputation.csv)
void write_reputation(std::ostream& out, const RunMetrics& metrics);

/// `iteration,client,reputation,correct`
void write_requests(std::ostream& out, const RunMetrics& metrics);

struct SweepRow {
    double malicious_frac = 0.0;
    Mode mode = Mode::Rational;
    std::string client_class; // good | bad | all
    double rate = 0.0;
    std::size_t requests = 0;
};

/// Pooled correct-output rate per (fraction, mode, client class) over the seeds.
/// Classes come from goodness, so baseline rows are split too.
std::vector<SweepRow> run_sweep(const SimConfig& base, const std::vector<double>& fracs,
                                const std::vector<Mode>& modes,
                                const std::vector<std::uint64_t>& seeds);

/// `malicious_frac,mode,client_class,rate`
void write_fig4(std::ostream& out, const std::vector<SweepRow>& rows);

/// Writes fig1.csv, fig2.csv, fig3.csv and reputation.csv into `dir`.
void write_run_outputs(const std::string& dir, const RunMetrics& metrics, bool with_requests);

} // namespace coutile
