#include "coutile/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace coutile {

std::string_view mode_name(Mode m)
{
    switch (m) {
    case Mode::Hbc: return "hbc";
    case Mode::Rational: return "rational";
    case Mode::Baseline: return "baseline";
    }
    return "rational";
}

Mode parse_mode(std::string_view text)
{
    if (text == "hbc")
        return Mode::Hbc;
    if (text == "rational")
        return Mode::Rational;
    if (text == "baseline")
        return Mode::Baseline;
    throw ConfigError("mode must be one of hbc, rational, baseline");
}

namespace {

// Symbol names from the model (n, m, r, T, p, M) name the same settings.
const std::map<std::string, std::string>& symbol_aliases()
{
    static const std::map<std::string, std::string> aliases = {
        {"n", "peers"},      {"m", "clients"},   {"r", "redundancy"},
        {"T", "iterations"}, {"p", "p-forward"}, {"M", "managers"},
    };
    return aliases;
}

std::string canonical_key(std::string_view key)
{
    std::string k(key);
    std::replace(k.begin(), k.end(), '_', '-');
    auto it = symbol_aliases().find(k);
    return it == symbol_aliases().end() ? k : it->second;
}

std::string_view trim(std::string_view s)
{
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text)
{
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": not a valid number: '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text)
{
    if (text == "1" || text == "true" || text == "on" || text == "yes")
        return true;
    if (text == "0" || text == "false" || text == "off" || text == "no")
        return false;
    throw ConfigError(std::string(key) + ": expected true or false");
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "peers",      "clients",  "redundancy",     "iterations", "delta",
        "p-forward",  "managers", "kappa-max",      "epsilon",    "max-iter",
        "malicious-frac", "mode", "publish-output", "seed",       "out",
        "max-hops",   "crypto",   "computation",
    };
    return keys;
}

void apply_setting(SimConfig& cfg, std::string_view raw_key, std::string_view raw_value)
{
    const auto key = canonical_key(trim(raw_key));
    const auto value = trim(raw_value);
    if (key == "peers")
        cfg.peers = parse_number<std::size_t>(key, value);
    else if (key == "clients")
        cfg.clients = parse_number<std::size_t>(key, value);
    else if (key == "redundancy")
        cfg.redundancy = parse_number<std::size_t>(key, value);
    else if (key == "iterations")
        cfg.iterations = parse_number<std::size_t>(key, value);
    else if (key == "delta")
        cfg.delta = parse_number<double>(key, value);
    else if (key == "p-forward")
        cfg.p_forward = parse_number<double>(key, value);
    else if (key == "managers")
        cfg.managers = parse_number<std::size_t>(key, value);
    else if (key == "kappa-max")
        cfg.kappa_max = parse_number<std::size_t>(key, value);
    else if (key == "epsilon")
        cfg.epsilon = parse_number<double>(key, value);
    else if (key == "max-iter")
        cfg.max_iter = parse_number<std::size_t>(key, value);
    else if (key == "malicious-frac")
        cfg.malicious_frac = parse_number<double>(key, value);
    else if (key == "mode")
        cfg.mode = parse_mode(value);
    else if (key == "publish-output")
        cfg.publish_output = parse_bool(key, value);
    else if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out")
        cfg.out = std::string(value);
    else if (key == "max-hops")
        cfg.max_hops = parse_number<std::size_t>(key, value);
    else if (key == "crypto")
        cfg.crypto = std::string(value);
    else if (key == "computation")
        cfg.computation = std::string(value);
    else
        throw ConfigError("unknown setting '" + std::string(raw_key) + "'");
}

void load_config_file(SimConfig& cfg, std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty())
            continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
    }
}

void validate(const SimConfig& c)
{
    if (c.clients < 4)
        throw ConfigError("m must be ≥ 4");
    if (c.peers < c.clients)
        throw ConfigError("n must be ≥ m");
    if (c.redundancy < 1)
        throw ConfigError("r must be ≥ 1");
    if (c.kappa_max <= c.redundancy)
        throw ConfigError("kappa_max must be > r");
    if (c.mode == Mode::Rational && c.kappa_max + 1 > c.peers)
        throw ConfigError("n must be ≥ kappa_max + 1");
    if (c.mode == Mode::Baseline && c.redundancy + 1 > c.peers)
        throw ConfigError("n must be ≥ r + 1");
    if (!(c.delta >= 0))
        throw ConfigError("delta must be ≥ 0");
    if (!(c.p_forward >= 0 && c.p_forward <= 1))
        throw ConfigError("p must be in [0, 1]");
    if (!(c.malicious_frac >= 0 && c.malicious_frac <= 1))
        throw ConfigError("malicious_frac must be in [0, 1]");
    if (!(c.epsilon > 0))
        throw ConfigError("epsilon must be > 0");
    if (c.max_iter < 1)
        throw ConfigError("max_iter must be ≥ 1");
    if (c.managers >= c.peers)
        throw ConfigError("M must be < n");
    if (c.crypto != "sim" && c.crypto != "sodium")
        throw ConfigError("crypto must be sim or sodium");
    if (c.computation != "rank" && c.computation != "diffs" && c.computation != "tally")
        throw ConfigError("computation must be rank, diffs or tally");
    if (c.p_forward >= 1 && c.max_hops == 0)
        throw ConfigError("p = 1 requires a hop cap (max_hops > 0)");
}

std::string dump_config(const SimConfig& c)
{
    std::ostringstream out;
    out << "peers=" << c.peers << '\n'
        << "clients=" << c.clients << '\n'
        << "redundancy=" << c.redundancy << '\n'
        << "iterations=" << c.iterations << '\n'
        << "delta=" << format_double(c.delta) << '\n'
        << "p-forward=" << format_double(c.p_forward) << '\n'
        << "managers=" << c.managers << '\n'
        << "kappa-max=" << c.kappa_max << '\n'
        << "epsilon=" << format_double(c.epsilon) << '\n'
        << "max-iter=" << c.max_iter << '\n'
        << "malicious-frac=" << format_double(c.malicious_frac) << '\n'
        << "mode=" << mode_name(c.mode) << '\n'
        << "publish-output=" << (c.publish_output ? "true" : "false") << '\n'
        << "seed=" << c.seed << '\n'
        << "out=" << c.out << '\n'
        << "max-hops=" << c.max_hops << '\n'
        << "crypto=" << c.crypto << '\n'
        << "computation=" << c.computation << '\n';
    return out.str();
}

void register_config_flags(CLI::App& app, ConfigFlags& flags)
{
    app.add_option("--config", flags.config_file, "key=value settings file");
    for (const auto& key : config_keys()) {
        if (key == "publish-output")
            continue;
        app.add_option("--" + key, flags.values[key]);
    }
    for (const auto& [symbol, key] : symbol_aliases())
        app.add_option("--" + symbol, flags.values[key]);
    app.add_flag("--publish-output{true}", flags.values["publish-output"],
                 "post outputs to the public bulletin");
}

SimConfig resolve_config(const CLI::App& app, const ConfigFlags& flags)
{
    SimConfig cfg;
    if (!flags.config_file.empty()) {
        std::ifstream in(flags.config_file);
        if (!in)
            throw ConfigError("cannot read config file " + flags.config_file);
        load_config_file(cfg, in);
    }
    for (const auto& key : config_keys()) {
        bool given = app.count("--" + key) > 0;
        for (const auto& [symbol, target] : symbol_aliases())
            given = given || (target == key && app.count("--" + symbol) > 0);
        if (given)
            apply_setting(cfg, key, flags.values.at(key));
    }
    validate(cfg);
    return cfg;
}

SimConfig parse_config(const std::vector<std::string>& args)
{
    CLI::App app("coutile");
    ConfigFlags flags;
    register_config_flags(app, flags);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    return resolve_config(app, flags);
}

} // namespace coutile
