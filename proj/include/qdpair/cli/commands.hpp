#ifndef QDPAIR_CLI_COMMANDS_HPP
#define QDPAIR_CLI_COMMANDS_HPP

#include "../dynamics.hpp"
#include "../observables.hpp"
#include "../oracle.hpp"
#include "../sweep.hpp"
#include "../version.hpp"
#include "config.hpp"
#include "output.hpp"
#include "validate.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qdpair::cli
{

/// Exit statuses of run().
enum ExitStatus : int
{
    kOk = 0,
    kCheckFailed = 1, ///< validate found a hard failure
    kCellFailures = 3 ///< sweep finished but some cells failed
};

inline std::string sidecar_path(const std::string& output) { return output + ".json"; }

inline void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    f << contents;
    f.close();
    if (!f)
        throw Error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string render(const Table& t, Format format)
{
    if (format == Format::json)
        return t.to_json().dump(2) + "\n";
    std::ostringstream os;
    t.write_csv(os);
    return os.str();
}

inline nlohmann::json params_json(const SystemParams& p)
{
    return {{"gamma", p.gamma},   {"chi_r", p.chi_r}, {"omega_dd", p.omega_dd}, {"gamma_pn", p.gamma_pn},
            {"n_bar", p.n_bar},   {"rabi", p.rabi},   {"detuning", p.detuning}};
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Config entries embedded in a sweep metadata sidecar.
inline Entries entries_from_metadata(const std::string& json_text)
{
    const auto j = nlohmann::json::parse(json_text);
    if (!j.contains("config") || !j.at("config").is_object())
        throw ConfigError("metadata has no 'config' object");
    Entries e;
    for (const auto& [k, v] : j.at("config").items())
        e[k] = v.get<std::string>();
    return e;
}

inline DensityMatrix4 initial_state(const std::string& name)
{
    if (name == "e")
        return DensityMatrix4::pure(Dicke::e);
    if (name == "s")
        return DensityMatrix4::pure(Dicke::s);
    if (name == "a")
        return DensityMatrix4::pure(Dicke::a);
    if (name == "mixed")
        return DensityMatrix4::maximally_mixed();
    return DensityMatrix4::pure(Dicke::g);
}

inline int run_steady(const RunConfig& cfg, std::ostream& log)
{
    const SteadyState ss = steady_state(cfg.params);
    if (!ss.unique)
        log << "warning: " << ss.diagnostic << '\n';
    write_file(cfg.output_path, render(steady_table(ss, observe(ss.rho, cfg.params)), cfg.format));
    return kOk;
}

inline int run_evolve(const RunConfig& cfg, std::ostream& log)
{
    const TimeGrid& tg = *cfg.times;
    std::vector<double> times(tg.count);
    for (std::size_t i = 0; i < tg.count; ++i)
        times[i] = i + 1 == tg.count ? tg.t_end : tg.t_end * static_cast<double>(i) / static_cast<double>(tg.count - 1);
    const Trajectory traj = propagate(initial_state(tg.initial_state), cfg.params, times, tg.tol);
    if (traj.drift_warnings > 0)
        log << "warning: " << traj.drift_warnings << " emitted states drifted by more than 10 * tol before correction\n";
    std::vector<ObservableSet> obs;
    obs.reserve(traj.states.size());
    for (const auto& rho : traj.states)
        obs.push_back(observe(rho, cfg.params));
    write_file(cfg.output_path, render(evolve_table(times, obs), cfg.format));
    return kOk;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& log, unsigned workers)
{
    const SweepResult result = sweep_steady(*cfg.grid, workers);
    write_file(cfg.output_path, render(sweep_table(result), cfg.format));

    const GridSpec& g = *cfg.grid;
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["timestamp"] = utc_timestamp();
    meta["command"] = "sweep";
    meta["params"] = params_json(g.base);
    meta["grid"] = {{"detuning", {{"min", g.detuning.min}, {"max", g.detuning.max}, {"count", g.detuning.count}}},
                    {"rabi", {{"min", g.rabi.min}, {"max", g.rabi.max}, {"count", g.rabi.count}}}};
    meta["columns"] = sweep_columns();
    meta["config"] = cfg.entries;
    meta["failures"] = nlohmann::json::array();
    for (const auto& f : result.failures)
        meta["failures"].push_back({{"rabi_index", f.row},
                                    {"detuning_index", f.col},
                                    {"rabi", g.rabi.value(f.row)},
                                    {"delta", g.detuning.value(f.col)},
                                    {"message", f.message}});
    write_file(sidecar_path(cfg.output_path), meta.dump(2) + "\n");

    if (!result.failures.empty()) {
        log << result.failures.size() << " of " << g.size() << " cells failed; see " << sidecar_path(cfg.output_path)
            << '\n';
        return kCellFailures;
    }
    return kOk;
}

inline int run_limits(const RunConfig& cfg)
{
    Table t{limits_columns(), {}};
    const Range& r = *cfg.n_bar_grid;
    for (std::size_t i = 0; i < r.count; ++i) {
        const double n = r.value(i);
        const auto l = oracle::strong_phonon_limits(n);
        t.rows.push_back({n, l.r_aa, l.r_ss, l.concurrence});
    }
    write_file(cfg.output_path, render(t, cfg.format));
    return kOk;
}

inline int run_convert(const RunConfig& cfg, std::ostream& out)
{
    const oracle::PhysicalParams& ph = *cfg.physical;
    const oracle::PhysicalRates rates = oracle::physical_rates(ph);
    const SystemParams p = oracle::to_system_params(ph, cfg.params.chi_r, cfg.params.rabi, cfg.params.detuning);

    nlohmann::json j;
    j["physical"] = {{"phonon_a_s_per_K", ph.A}, {"omega_c", ph.omega_c}, {"temperature", ph.T},
                     {"zeta", ph.zeta},          {"kr", ph.kr},           {"wavenumber", ph.k},
                     {"dipole", ph.d},           {"epsilon", ph.epsilon}};
    j["rates_si"] = {{"gamma", rates.gamma},
                     {"omega_dd", rates.omega_dd},
                     {"gamma_pn", rates.gamma_pn},
                     {"n_bar", rates.n_bar}};
    j["system"] = params_json(p);

    std::ostringstream os;
    if (cfg.format == Format::json) {
        os << j.dump(2) << '\n';
    }
    else {
        // the "system" block is itself a valid config fragment
        os << "# physical inputs (SI)\n";
        for (const auto& [k, v] : j["physical"].items())
            os << "# " << k << " = " << format_number(v.get<double>()) << '\n';
        os << "# derived rates (1/s)\n";
        for (const auto& [k, v] : j["rates_si"].items())
            os << "# " << k << " = " << format_number(v.get<double>()) << '\n';
        os << "# dimensionless model parameters (units of gamma)\n";
        for (const auto& [k, v] : j["system"].items())
            os << k << " = " << format_number(v.get<double>()) << '\n';
    }
    out << os.str();
    if (!cfg.output_path.empty())
        write_file(cfg.output_path, os.str());
    return kOk;
}

inline int run_validate(const RunConfig& cfg, std::ostream& out)
{
    const ValidationReport report = run_validation();
    for (const auto& c : report.checks) {
        const char* status = c.passed ? "PASS" : (c.hard ? "FAIL" : "REPORT");
        char nums[64];
        std::snprintf(nums, sizeof nums, "max_error=%.3g tol=%.3g", c.max_error, c.tolerance);
        out << std::left << std::setw(7) << status << c.name << "  " << nums << (c.hard ? "" : " (informational)")
            << '\n';
    }
    if (!cfg.output_path.empty())
        write_file(cfg.output_path, report.to_json().dump(2) + "\n");
    return report.passed() ? kOk : kCheckFailed;
}

/// Executes one configured command. `out` receives human-readable output,
/// `log` warnings. workers = 0 selects the default worker count.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& log, unsigned workers = 0)
{
    switch (cfg.command) {
    case Command::steady: return run_steady(cfg, log);
    case Command::evolve: return run_evolve(cfg, log);
    case Command::sweep: return run_sweep(cfg, log, workers);
    case Command::limits: return run_limits(cfg);
    case Command::convert: return run_convert(cfg, out);
    case Command::validate: return run_validate(cfg, out);
    }
    return kOk;
}

} // namespace qdpair::cli

#endif // QDPAIR_CLI_COMMANDS_HPP
