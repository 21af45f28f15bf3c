#pragma once

#include "coutile/identity.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace CLI {
class App;
}

namespace coutile {

enum class Mode { Hbc, Rational, Baseline };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view text);

struct SimConfig {
    std::size_t peers = 100;
    std::size_t clients = 10;
    std::size_t redundancy = 3;
    std::size_t iterations = 250;
    double delta = 0.002;
    double p_forward = 0.67;
    std::size_t managers = 3;
    std::size_t kappa_max = 10;
    double epsilon = 1e-6;
    std::size_t max_iter = 1000;
    double malicious_frac = 0.2;
    Mode mode = Mode::Rational;
    bool publish_output = false;
    std::uint64_t seed = 1;
    std::string out = ".";
    // 0 disables the cap.
    std::size_t max_hops = 64;
    std::string crypto = "sim";
    // rank | diffs | tally
    std::string computation = "rank";

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Names accepted by apply_setting, in dump order. Each is also a `--name` flag.
const std::vector<std::string>& config_keys();

/// Sets one field from text. Keys may use '-' or '_'. Throws ConfigError.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; '#' starts a comment.
void load_config_file(SimConfig& cfg, std::istream& in);

/// Throws ConfigError naming the first violated constraint.
void validate(const SimConfig& cfg);

/// key=value lines that load_config_file reads back to the same config.
std::string dump_config(const SimConfig& cfg);

/// Raw flag values captured by CLI11; only flags actually given are applied.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
};

void register_config_flags(CLI::App& app, ConfigFlags& flags);

/// defaults < config file < flags, then validate().
SimConfig resolve_config(const CLI::App& app, const ConfigFlags& flags);

/// Convenience for callers without their own CLI::App (tests, embedding).
SimConfig parse_config(const std::vector<std::string>& args);

} // namespace coutile
