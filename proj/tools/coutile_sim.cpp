// coutile-sim: run the co-utile MPC simulation and emit figure CSVs.

#include "coutile/config.hpp"
#include "coutile/figures.hpp"
#include "coutile/simulation.hpp"
#include "coutile/trace.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace coutile;

namespace {

void summarize(std::ostream& out, const SimConfig& cfg, const RunMetrics& m)
{
    std::size_t ok = 0;
    for (const auto& r : m.requests)
        ok += r.correct ? 1 : 0;
    const double rate = m.requests.empty() ? 0.0 : static_cast<double>(ok) / m.requests.size();
    auto q = quartile_rates(rate_rows(m));
    out << "mode=" << mode_name(cfg.mode) << " seed=" << cfg.seed << " iterations=" << m.iterations
        << " requests=" << m.requests.size() << " correct_rate=" << rate << '\n'
        << "top_quartile=" << q.top << " bottom_quartile=" << q.bottom << '\n'
        << "hops=" << m.totals.hops << " discards=" << m.totals.discards
        << " refusals=" << m.totals.refusals << " no_forwardee=" << m.totals.no_forwardee
        << " degraded=" << m.totals.degraded_submissions << " hop_caps=" << m.totals.hop_caps
        << " timeouts=" << m.totals.timeouts << " audit_punishments=" << m.totals.audit_punishments
        << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app("Co-utile peer-to-peer MPC simulator");
    app.require_subcommand(1);
    app.fallthrough();

    ConfigFlags flags;
    register_config_flags(app, flags);

    auto* run = app.add_subcommand("run", "single run; writes fig1-3 and reputation.csv");
    bool with_requests = false;
    run->add_flag("--requests", with_requests, "also write requests.csv");

    auto* sweep = app.add_subcommand("sweep", "malicious_frac x mode grid; writes fig4.csv");
    std::vector<double> fracs = {0.0, 0.1, 0.2, 0.3, 0.4};
    std::size_t sweep_seeds = 3;
    sweep->add_option("--fracs", fracs, "malicious fractions")->delimiter(',');
    sweep->add_option("--sweep-seeds", sweep_seeds, "seeds per grid point, from --seed upward");

    auto* dump = app.add_subcommand("dump-config", "print the resolved configuration");

    auto* trace = app.add_subcommand("trace", "single run with the channel trace; writes trace.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    SimConfig cfg;
    try {
        cfg = resolve_config(app, flags);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*dump) {
            std::cout << dump_config(cfg);
            return 0;
        }
        if (*run) {
            auto m = run_simulation(cfg);
            write_run_outputs(cfg.out, m, with_requests);
            summarize(std::cout, cfg, m);
            return 0;
        }
        if (*trace) {
            TraceLog log;
            std::unordered_map<std::uint64_t, PeerIndex> origins;
            RunOptions opt;
            opt.trace = &log;
            opt.originators = &origins;
            World world = build_world(cfg);
            auto m = run_world(world, opt);
            write_run_outputs(cfg.out, m, false);
            std::ofstream f(std::filesystem::path(cfg.out) / "trace.csv", std::ios::binary);
            log.write_csv(f, world.directory.pseudonyms);
            auto audit = audit_anonymity(log.events(), origins);
            summarize(std::cout, cfg, m);
            std::cout << "trace_records=" << audit.records << " originator_exposures=" << audit.violations
                      << " loopbacks=" << audit.loopbacks << '\n';
            return 0;
        }
        if (*sweep) {
            std::vector<std::uint64_t> seeds;
            for (std::size_t k = 0; k < sweep_seeds; ++k)
                seeds.push_back(cfg.seed + k);
            auto rows = run_sweep(cfg, fracs, {Mode::Rational, Mode::Baseline}, seeds);
            std::filesystem::create_directories(cfg.out);
            std::ofstream f(std::filesystem::path(cfg.out) / "fig4.csv", std::ios::binary);
            write_fig4(f, rows);
            write_fig4(std::cout, rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
