#ifndef QDPAIR_CLI_VALIDATE_HPP
#define QDPAIR_CLI_VALIDATE_HPP

// Built-in cross-checks behind `qdpair validate`. Hard checks decide the exit
// status; soft checks only contribute to the JSON report (closed forms whose
// validity regime is approximate, or whose transcription we want to audit).

#include "../dynamics.hpp"
#include "../model.hpp"
#include "../observables.hpp"
#include "../oracle.hpp"
#include "../random.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace qdpair::cli
{

struct CheckResult
{
    std::string name;
    bool hard = true;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
    nlohmann::json detail = nlohmann::json::object();
};

struct ValidationReport
{
    std::vector<CheckResult> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.hard || c.passed; });
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["passed"] = passed();
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name},
                                   {"hard", c.hard},
                                   {"passed", c.passed},
                                   {"max_error", c.max_error},
                                   {"tolerance", c.tolerance},
                                   {"detail", c.detail}});
        return j;
    }
};

namespace validate_detail
{

inline SystemParams reference_rates()
{
    SystemParams p;
    p.chi_r = 0.9;
    p.omega_dd = 15.0;
    p.gamma_pn = 3.0;
    p.n_bar = 0.05;
    return p;
}

inline CheckResult generator_check()
{
    CheckResult c{"liouvillian_matches_rhs", true, false, 0.0, 1e-12};
    random::Engine rng(101);
    double trace_err = 0.0, herm_err = 0.0;
    for (int k = 0; k < 10; ++k) {
        const SystemParams p = random::system_params(rng);
        const Superoperator16 l = build_liouvillian(p);
        const double scale = std::max(1.0, l.matrix().cwiseAbs().maxCoeff());
        for (int s = 0; s < 100; ++s) {
            const DensityMatrix4 rho = random::density_matrix(rng);
            const Matrix4c d = rhs(rho, p);
            c.max_error = std::max(c.max_error, (l.apply(rho.matrix()) - d).cwiseAbs().maxCoeff() / scale);
            trace_err = std::max(trace_err, std::abs(d.trace()) / scale);
            herm_err = std::max(herm_err, (d - d.adjoint()).cwiseAbs().maxCoeff() / scale);
        }
    }
    c.max_error = std::max({c.max_error, trace_err, herm_err});
    c.passed = c.max_error <= c.tolerance;
    c.detail = {{"trace_error", trace_err}, {"hermiticity_error", herm_err}};
    return c;
}

/// Returns {propagate-vs-matexp, closed-form-vs-matexp}.
inline std::pair<CheckResult, CheckResult> no_drive_checks()
{
    CheckResult prop{"propagate_matches_matrix_exponential", true, false, 0.0, 1e-6};
    CheckResult closed{"closed_form_matches_matrix_exponential", false, false, 0.0, 1e-9};

    random::Engine rng(202);
    std::vector<SystemParams> sets{reference_rates()};
    for (int k = 0; k < 5; ++k) {
        SystemParams p = random::system_params(rng);
        p.rabi = 0.0;
        sets.push_back(p);
    }
    const std::vector<std::array<double, 4>> inits{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0.1, 0.2, 0.3, 0.4}};
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i)
        times.push_back(0.5 * i);

    std::array<double, 4> per_term{};
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& p : sets) {
        for (const auto& pops0 : inits) {
            const Trajectory traj = propagate(DensityMatrix4::diagonal(pops0), p, times, 1e-10);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const auto ref = oracle::matexp_populations(p, pops0, times[i]);
                for (int j = 0; j < 4; ++j)
                    prop.max_error = std::max(prop.max_error,
                                              std::abs(traj.states[i].population(static_cast<Dicke>(j)) -
                                                       ref[static_cast<std::size_t>(j)]));
                try {
                    const auto cf = oracle::analytic_populations(p, pops0, times[i]);
                    for (std::size_t j = 0; j < 4; ++j)
                        per_term[j] = std::max(per_term[j], std::abs(cf[j] - ref[j]));
                }
                catch (const ParameterError& ex) {
                    skipped.push_back(ex.what());
                }
            }
        }
    }
    prop.passed = prop.max_error <= prop.tolerance;
    closed.max_error = *std::max_element(per_term.begin(), per_term.end());
    closed.passed = closed.max_error <= closed.tolerance;
    closed.detail = {{"R_ee", per_term[0]}, {"R_ss", per_term[1]}, {"R_aa", per_term[2]}, {"R_gg", per_term[3]},
                     {"skipped", skipped}};
    return {prop, closed};
}

inline CheckResult steady_state_check()
{
    CheckResult c{"steady_state_matches_relaxation", true, false, 0.0, 1e-6};
    random::Engine rng(303);
    for (int k = 0; k < 5; ++k) {
        const SystemParams p = random::system_params(rng);
        const SteadyState direct = steady_state(p);
        const SteadyState relaxed = steady_state_by_evolution(p, 1e5, 1e-10);
        c.max_error = std::max(c.max_error, (direct.rho.matrix() - relaxed.rho.matrix()).cwiseAbs().maxCoeff());
    }
    c.passed = c.max_error <= c.tolerance;
    return c;
}

inline CheckResult concurrence_check()
{
    CheckResult c{"concurrence_oracles", true, false, 0.0, 1e-12};
    random::Engine rng(404);
    double endpoints = std::abs(concurrence(DensityMatrix4::pure(Dicke::a)) - 1.0) +
                       std::abs(concurrence(DensityMatrix4::pure(Dicke::s)) - 1.0) +
                       concurrence(DensityMatrix4::pure(Dicke::g)) + concurrence(DensityMatrix4::pure(Dicke::e));
    double pure_err = 0.0;
    for (int k = 0; k < 200; ++k) {
        const auto v = random::state_vector(rng);
        const Matrix4c rho = v * v.adjoint();
        const double expected = 2.0 * std::abs(v(0) * v(3) - v(1) * v(2));
        pure_err = std::max(pure_err, std::abs(concurrence_product_basis(rho) - expected));
    }
    double x_err = 0.0;
    for (int k = 0; k < 200; ++k) {
        // X state: diagonal plus the (eg,ge) and (ee,gg) coherences, kept PSD
        std::array<double, 4> d{};
        double sum = 0.0;
        for (auto& v : d)
            sum += (v = random::uniform(rng, 0.0, 1.0));
        for (auto& v : d)
            v /= sum;
        const Complex z = std::polar(random::uniform(rng, 0.0, 1.0) * std::sqrt(d[1] * d[2]),
                                     random::uniform(rng, 0.0, 6.283185307179586));
        const Complex w = std::polar(random::uniform(rng, 0.0, 1.0) * std::sqrt(d[0] * d[3]),
                                     random::uniform(rng, 0.0, 6.283185307179586));
        Matrix4c rho = Matrix4c::Zero();
        for (int i = 0; i < 4; ++i)
            rho(i, i) = d[static_cast<std::size_t>(i)];
        rho(1, 2) = z;
        rho(2, 1) = std::conj(z);
        rho(0, 3) = w;
        rho(3, 0) = std::conj(w);
        const double expected =
            2.0 * std::max({0.0, std::abs(z) - std::sqrt(d[0] * d[3]), std::abs(w) - std::sqrt(d[1] * d[2])});
        x_err = std::max(x_err, std::abs(concurrence_product_basis(rho) - expected));
    }
    c.max_error = std::max({endpoints, pure_err, x_err});
    c.passed = c.max_error <= c.tolerance;
    c.detail = {{"endpoint_error", endpoints}, {"pure_state_error", pure_err}, {"x_state_error", x_err}};
    return c;
}

/// Solver versus the strong-phonon closed forms on an occupation grid.
inline CheckResult strong_phonon_check(double rabi)
{
    CheckResult c{"strong_phonon_limits_rabi_" + std::to_string(static_cast<int>(rabi)), false, false, 0.0, 0.1};
    SystemParams p;
    p.chi_r = 0.99;
    p.omega_dd = 15.0;
    p.gamma_pn = 1000.0;
    p.rabi = rabi;
    p.detuning = -15.0;
    double pop_err = 0.0, c_err_closed = 0.0, c_err_diag = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i <= 14; ++i) {
        p.n_bar = 0.05 * i;
        const SteadyState ss = steady_state(p);
        const ObservableSet o = observe(ss.rho, p);
        const auto lim = oracle::strong_phonon_limits(p.n_bar);
        const double diag_c = oracle::strong_phonon_diagonal_concurrence(p.n_bar);
        const double e = std::max({std::abs(o.populations[0] - lim.r_ss), std::abs(o.populations[1] - lim.r_ss),
                                   std::abs(o.populations[2] - lim.r_aa), std::abs(o.populations[3] - lim.r_ss)});
        pop_err = std::max(pop_err, e);
        c_err_closed = std::max(c_err_closed, std::abs(o.concurrence - lim.concurrence));
        c_err_diag = std::max(c_err_diag, std::abs(o.concurrence - diag_c));
        rows.push_back({{"n_bar", p.n_bar},
                        {"C_solver", o.concurrence},
                        {"C_closed_form", lim.concurrence},
                        {"C_diagonal", diag_c},
                        {"R_aa_solver", o.populations[2]},
                        {"R_aa_closed_form", lim.r_aa}});
    }
    c.max_error = c_err_closed;
    c.passed = c_err_closed <= c.tolerance;
    c.detail = {{"rabi", rabi},
                {"gamma_pn", p.gamma_pn},
                {"population_max_deviation", pop_err},
                {"concurrence_max_deviation_closed_form", c_err_closed},
                {"concurrence_max_deviation_diagonal_state", c_err_diag},
                {"samples", rows}};
    return c;
}

} // namespace validate_detail

inline ValidationReport run_validation()
{
    using namespace validate_detail;
    ValidationReport r;
    r.checks.push_back(generator_check());
    auto [prop, closed] = no_drive_checks();
    r.checks.push_back(prop);
    r.checks.push_back(closed);
    r.checks.push_back(steady_state_check());
    r.checks.push_back(concurrence_check());
    r.checks.push_back(strong_phonon_check(5.0));
    r.checks.push_back(strong_phonon_check(200.0));
    return r;
}

} // namespace qdpair::cli

#endif // QDPAIR_CLI_VALIDATE_HPP
