#ifndef QDPAIR_CLI_CONFIG_HPP
#define QDPAIR_CLI_CONFIG_HPP

// Flat "key = value" run configuration. '#' starts a comment; blank lines are
// ignored; every key may appear at most once; unknown keys are errors.
// Command-line overrides are applied on top of the file before validation.

#include "../oracle.hpp"
#include "../sweep.hpp"
#include "../types.hpp"

#include <charconv>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace qdpair::cli
{

class ConfigError : public Error
{
public:
    using Error::Error;
};

enum class Command
{
    steady,
    evolve,
    sweep,
    limits,
    convert,
    validate
};

enum class Format
{
    csv,
    json
};

struct TimeGrid
{
    double t_end = 10.0;
    std::size_t count = 201;
    double tol = 1e-9;
    std::string initial_state = "g"; ///< one of e, s, a, g, mixed
};

struct RunConfig
{
    Command command = Command::steady;
    SystemParams params;
    std::optional<GridSpec> grid;
    std::optional<TimeGrid> times;
    std::optional<Range> n_bar_grid;
    std::optional<oracle::PhysicalParams> physical;
    std::string output_path;
    Format format = Format::csv;
    /// Merged key/value text that produced this config, used to reproduce runs.
    std::map<std::string, std::string> entries;
};

using Entries = std::map<std::string, std::string>;

inline const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "command", "output", "format",
        "gamma", "chi_r", "omega_dd", "gamma_pn", "n_bar", "rabi", "detuning",
        "detuning_min", "detuning_max", "detuning_count", "rabi_min", "rabi_max", "rabi_count",
        "t_end", "t_count", "tol", "initial_state",
        "n_bar_min", "n_bar_max", "n_bar_count",
        "phonon_a", "omega_c", "temperature", "zeta", "kr", "wavenumber", "dipole", "epsilon",
    };
    return keys;
}

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Parses the flat text form; does not validate values.
inline Entries parse_entries(std::string_view text)
{
    Entries out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        if (!known_keys().contains(key))
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return out;
}

/// Canonical text form (sorted keys); parse_entries(to_text(e)) == e.
inline std::string to_text(const Entries& entries)
{
    std::string out;
    for (const auto& [k, v] : entries)
        out += k + " = " + v + "\n";
    return out;
}

namespace detail
{

inline double parse_number(const Entries& e, const std::string& key)
{
    const std::string& s = e.at(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(key + ": '" + s + "' is not a finite number");
    return v;
}

inline std::size_t parse_count(const Entries& e, const std::string& key)
{
    const std::string& s = e.at(key);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(key + ": '" + s + "' is not an integer");
    if (v < 1)
        throw ConfigError(key + " = " + s + " is out of range; accepted range [1, inf)");
    return static_cast<std::size_t>(v);
}

inline double require(const Entries& e, const std::string& key, const char* command)
{
    if (!e.contains(key))
        throw ConfigError(std::string("missing required key '") + key + "' for command " + command);
    return parse_number(e, key);
}

inline double optional_number(const Entries& e, const std::string& key, double fallback)
{
    return e.contains(key) ? parse_number(e, key) : fallback;
}

inline void check_range(const std::string& key, double v, double lo, double hi, bool lo_open = false)
{
    const bool below = lo_open ? !(v > lo) : !(v >= lo);
    if (below || v > hi) {
        std::ostringstream os;
        os << key << " = " << v << " is out of range; accepted range " << (lo_open ? "(" : "[") << lo << ", ";
        if (std::isinf(hi))
            os << "inf)";
        else
            os << hi << "]";
        throw ConfigError(os.str());
    }
}

inline Command parse_command(const std::string& s)
{
    static const std::map<std::string, Command> m{{"steady", Command::steady},   {"evolve", Command::evolve},
                                                  {"sweep", Command::sweep},     {"limits", Command::limits},
                                                  {"convert", Command::convert}, {"validate", Command::validate}};
    const auto it = m.find(s);
    if (it == m.end())
        throw ConfigError("command: '" + s + "' is not one of steady, evolve, sweep, limits, convert, validate");
    return it->second;
}

} // namespace detail

inline const char* command_name(Command c)
{
    switch (c) {
    case Command::steady: return "steady";
    case Command::evolve: return "evolve";
    case Command::sweep: return "sweep";
    case Command::limits: return "limits";
    case Command::convert: return "convert";
    case Command::validate: return "validate";
    }
    return "?";
}

/// Merges overrides onto the file entries and validates the result.
inline RunConfig parse_config(std::string_view file_text, const Entries& overrides = {})
{
    using namespace detail;
    constexpr double inf = std::numeric_limits<double>::infinity();

    Entries e = parse_entries(file_text);
    for (const auto& [k, v] : overrides) {
        if (!known_keys().contains(k))
            throw ConfigError("unknown key '" + k + "'");
        e[k] = v;
    }

    RunConfig cfg;
    cfg.entries = e;
    if (!e.contains("command"))
        throw ConfigError("missing required key 'command'");
    cfg.command = parse_command(e.at("command"));
    const char* cmd = command_name(cfg.command);

    if (e.contains("format")) {
        const std::string& f = e.at("format");
        if (f == "csv")
            cfg.format = Format::csv;
        else if (f == "json")
            cfg.format = Format::json;
        else
            throw ConfigError("format: '" + f + "' is not one of csv, json");
    }
    if (e.contains("output"))
        cfg.output_path = e.at("output");

    const bool needs_output = cfg.command != Command::convert && cfg.command != Command::validate;
    if (needs_output && cfg.output_path.empty())
        throw ConfigError(std::string("missing required key 'output' for command ") + cmd);

    const bool needs_model = cfg.command == Command::steady || cfg.command == Command::evolve ||
                             cfg.command == Command::sweep;
    if (needs_model) {
        SystemParams& p = cfg.params;
        p.gamma = optional_number(e, "gamma", 1.0);
        p.chi_r = require(e, "chi_r", cmd);
        p.omega_dd = require(e, "omega_dd", cmd);
        p.gamma_pn = require(e, "gamma_pn", cmd);
        p.n_bar = require(e, "n_bar", cmd);
        if (cfg.command == Command::sweep) {
            p.rabi = optional_number(e, "rabi", 0.0);
            p.detuning = optional_number(e, "detuning", 0.0);
        }
        else {
            p.rabi = require(e, "rabi", cmd);
            p.detuning = require(e, "detuning", cmd);
        }
        check_range("gamma", p.gamma, 0.0, inf, true);
        check_range("chi_r", p.chi_r, 0.0, 1.0);
        check_range("gamma_pn", p.gamma_pn, 0.0, inf);
        check_range("n_bar", p.n_bar, 0.0, inf);
        check_range("rabi", p.rabi, 0.0, inf);
        if (p.gamma_pn > 0.0 && p.omega_dd == 0.0)
            throw ConfigError("omega_dd = 0 is out of range when gamma_pn > 0; accepted range omega_dd != 0");
    }

    if (cfg.command == Command::sweep) {
        GridSpec g;
        g.base = cfg.params;
        g.detuning.min = optional_number(e, "detuning_min", -40.0);
        g.detuning.max = optional_number(e, "detuning_max", 40.0);
        g.detuning.count = e.contains("detuning_count") ? parse_count(e, "detuning_count") : 161;
        g.rabi.min = optional_number(e, "rabi_min", 0.25);
        g.rabi.max = optional_number(e, "rabi_max", 10.0);
        g.rabi.count = e.contains("rabi_count") ? parse_count(e, "rabi_count") : 41;
        check_range("rabi_min", g.rabi.min, 0.0, inf);
        check_range("detuning_max", g.detuning.max, g.detuning.min, inf);
        check_range("rabi_max", g.rabi.max, g.rabi.min, inf);
        cfg.grid = g;
    }

    if (cfg.command == Command::evolve) {
        TimeGrid t;
        t.t_end = require(e, "t_end", cmd);
        check_range("t_end", t.t_end, 0.0, inf, true);
        t.count = e.contains("t_count") ? parse_count(e, "t_count") : 201;
        check_range("t_count", static_cast<double>(t.count), 2.0, inf);
        t.tol = optional_number(e, "tol", 1e-9);
        check_range("tol", t.tol, 1e-12, 1e-3);
        if (e.contains("initial_state")) {
            t.initial_state = e.at("initial_state");
            static const std::set<std::string> states{"e", "s", "a", "g", "mixed"};
            if (!states.contains(t.initial_state))
                throw ConfigError("initial_state: '" + t.initial_state + "' is not one of e, s, a, g, mixed");
        }
        cfg.times = t;
    }

    if (cfg.command == Command::limits) {
        Range r;
        r.min = optional_number(e, "n_bar_min", 0.0);
        r.max = optional_number(e, "n_bar_max", 1.0);
        r.count = e.contains("n_bar_count") ? parse_count(e, "n_bar_count") : 101;
        check_range("n_bar_min", r.min, 0.0, inf);
        check_range("n_bar_max", r.max, r.min, inf);
        cfg.n_bar_grid = r;
    }

    if (cfg.command == Command::convert) {
        oracle::PhysicalParams ph;
        ph.A = require(e, "phonon_a", cmd) * 1e-15; // fs/K -> s/K
        ph.omega_c = require(e, "omega_c", cmd);
        ph.T = require(e, "temperature", cmd);
        ph.zeta = require(e, "zeta", cmd);
        ph.kr = require(e, "kr", cmd);
        ph.k = require(e, "wavenumber", cmd);
        ph.d = require(e, "dipole", cmd);
        ph.epsilon = require(e, "epsilon", cmd);
        check_range("phonon_a", ph.A, 0.0, inf);
        check_range("omega_c", ph.omega_c, 0.0, inf, true);
        check_range("temperature", ph.T, 0.0, inf, true);
        check_range("kr", ph.kr, 0.0, inf, true);
        check_range("wavenumber", ph.k, 0.0, inf, true);
        check_range("dipole", ph.d, 0.0, inf, true);
        check_range("epsilon", ph.epsilon, 0.0, inf, true);
        cfg.physical = ph;
        cfg.params.chi_r = require(e, "chi_r", cmd);
        check_range("chi_r", cfg.params.chi_r, 0.0, 1.0);
        cfg.params.rabi = optional_number(e, "rabi", 0.0);
        cfg.params.detuning = optional_number(e, "detuning", 0.0);
        check_range("rabi", cfg.params.rabi, 0.0, inf);
    }

    return cfg;
}

} // namespace qdpair::cli

#endif // QDPAIR_CLI_CONFIG_HPP
