// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "written_eom.hpp"

#include <qdpair/cli/output.hpp>
#include <qdpair/dynamics.hpp>
#include <qdpair/model.hpp>
#include <qdpair/observables.hpp>
#include <qdpair/oracle.hpp>
#include <qdpair/random.hpp>
#include <qdpair/sweep.hpp>

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace qdpair;

namespace
{

struct Outcome
{
    bool passed = false;
    std::string detail;
};

struct Criterion
{
    const char* id;
    const char* title;
    double budget_s; ///< runtime limit, <= 0 for none
    std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SystemParams reference_rates(double rabi = 0.0, double detuning = 0.0)
{
    SystemParams p;
    p.chi_r = 0.9;
    p.omega_dd = 15.0;
    p.gamma_pn = 3.0;
    p.n_bar = 0.05;
    p.rabi = rabi;
    p.detuning = detuning;
    return p;
}

SystemParams strong_phonon(double n_bar)
{
    SystemParams p;
    p.chi_r = 0.99;
    p.omega_dd = 15.0;
    p.gamma_pn = 1000.0;
    p.n_bar = n_bar;
    p.rabi = 5.0;
    p.detuning = -15.0;
    return p;
}

double max_diff(const std::array<double, 4>& a, const std::array<double, 4>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Outcome a1_generator()
{
    random::Engine rng(1001);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const SystemParams p = random::system_params(rng, {.chi_max = 1.0, .allow_negative_shift = false});
        const Matrix16c l = build_liouvillian(p).matrix();
        const Matrix16c ref = test::written_generator(p);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                worst = std::max(worst, std::abs(l(i, j) - ref(i, j)) / std::max(1.0, std::abs(ref(i, j))));
    }
    return {worst <= 1e-12, fmt("max relative coefficient error %.3g over 20 sets (tol 1e-12)", worst)};
}

Outcome a2_no_drive()
{
    random::Engine rng(1002);
    std::vector<SystemParams> sets{reference_rates()};
    for (int k = 0; k < 20; ++k) {
        SystemParams p = random::system_params(rng);
        p.rabi = 0.0;
        sets.push_back(p);
    }
    const std::vector<std::array<double, 4>> starts{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0.1, 0.2, 0.3, 0.4}};
    std::vector<double> times;
    for (int i = 0; i <= 100; ++i)
        times.push_back(0.1 * i);

    double prop_err = 0.0, closed_err = 0.0;
    for (const auto& p : sets) {
        for (const auto& pops0 : starts) {
            const Trajectory t = propagate(DensityMatrix4::diagonal(pops0), p, times, 1e-10);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const auto m = oracle::matexp_populations(p, pops0, times[i]);
                const auto& rho = t.states[i];
                const std::array<double, 4> num{rho.population(Dicke::e), rho.population(Dicke::s),
                                                rho.population(Dicke::a), rho.population(Dicke::g)};
                prop_err = std::max(prop_err, max_diff(num, m));
                closed_err = std::max(closed_err, max_diff(oracle::analytic_populations(p, pops0, times[i]), m));
            }
        }
    }
    // the closed form is reported; only propagate vs matexp gates the criterion
    const bool closed_ok = closed_err <= 1e-9;
    return {prop_err <= 1e-6, fmt("propagate vs matexp %.3g (tol 1e-6); closed form vs matexp %.3g (tol 1e-9, %s)",
                                  prop_err, closed_err, closed_ok ? "agrees" : "DISCREPANCY, see validate report")};
}

Outcome a3_steady_cross()
{
    random::Engine rng(1003);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const SystemParams p = random::system_params(rng, {.chi_max = 0.99});
        const SteadyState direct = steady_state(p);
        const SteadyState relaxed = steady_state_by_evolution(p, 1e5, 1e-10);
        worst = std::max(worst, (direct.rho.matrix() - relaxed.rho.matrix()).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-6, fmt("max entrywise difference %.3g over 50 sets (tol 1e-6)", worst)};
}

struct GridPeak
{
    double c = -1.0;
    double delta = 0.0;
    double rabi = 0.0;
};

GridPeak peak(const SweepResult& r)
{
    GridPeak best;
    for (std::size_t row = 0; row < r.grid.rabi.count; ++row)
        for (std::size_t col = 0; col < r.grid.detuning.count; ++col)
            if (const auto& cell = r.cell(row, col); cell && cell->concurrence > best.c)
                best = {cell->concurrence, r.grid.detuning.value(col), r.grid.rabi.value(row)};
    return best;
}

GridSpec reference_grid(double gamma_pn)
{
    GridSpec g;
    g.base = reference_rates();
    g.base.gamma_pn = gamma_pn;
    g.detuning = {-40.0, 40.0, 161};
    g.rabi = {0.25, 10.0, 41};
    return g;
}

Outcome a4_contrast()
{
    const SweepResult with = sweep_steady(reference_grid(3.0));
    const SweepResult without = sweep_steady(reference_grid(0.0));
    if (!with.failures.empty() || !without.failures.empty())
        return {false, fmt("%zu + %zu failed cells", with.failures.size(), without.failures.size())};
    const GridPeak a = peak(with);
    const GridPeak b = peak(without);
    const double ratio = a.c / b.c;
    const double offset = std::abs(a.delta + 15.0);
    return {ratio >= 1.5 && offset <= 5.0,
            fmt("max C %.4f at (delta %.1f, rabi %.3g) vs %.4f without phonons; ratio %.3f (>= 1.5), |delta + "
                "omega_dd| = %.2f (<= 5)",
                a.c, a.delta, a.rabi, b.c, ratio, offset)};
}

Outcome a5_transient()
{
    const SystemParams p = reference_rates(5.0, -15.0);
    SystemParams p0 = p;
    p0.gamma_pn = 0.0;
    const double steady_aa = steady_state(p).rho.population(Dicke::a);

    std::vector<double> times;
    for (int i = 0; i <= 3000; ++i)
        times.push_back(0.01 * i);
    double max_aa_without = 0.0;
    for (const auto& o : sweep_transient(p0, DensityMatrix4::pure(Dicke::g), times))
        max_aa_without = std::max(max_aa_without, o.populations[2]);
    max_aa_without = std::max(max_aa_without, steady_state(p0).rho.population(Dicke::a));

    std::vector<double> early;
    for (int i = 0; i <= 3000; ++i)
        early.push_back(0.001 * i);
    const auto obs = sweep_transient(p, DensityMatrix4::pure(Dicke::g), early);
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < obs.size(); ++i)
        if (obs[i].populations[1] > obs[i - 1].populations[1] && obs[i].populations[1] > obs[i + 1].populations[1])
            ++maxima;

    return {steady_aa >= 0.5 && max_aa_without <= 0.05 && maxima >= 3,
            fmt("steady R_aa %.4f (>= 0.5); max R_aa without phonons %.4f (<= 0.05); R_ss maxima in [0, 3] %d (>= 3)",
                steady_aa, max_aa_without, maxima)};
}

Outcome a6_strong_phonon_populations()
{
    double worst = 0.0;
    std::ostringstream os;
    for (double n : {0.05, 0.3, 0.65}) {
        const auto pops = populations(steady_state(strong_phonon(n)).rho);
        const auto lim = oracle::strong_phonon_limits(n);
        const double e = max_diff(pops, {lim.r_ss, lim.r_ss, lim.r_aa, lim.r_ss});
        worst = std::max(worst, e);
        os << fmt("n=%.2f R_aa %.4f vs %.4f, R_ss %.4f vs %.4f; ", n, pops[2], lim.r_aa, pops[1], lim.r_ss);
    }
    os << fmt("max abs deviation %.4f (tol 0.02)", worst);
    return {worst <= 0.02, os.str()};
}

Outcome a7_strong_phonon_concurrence()
{
    const double c_low = concurrence(steady_state(strong_phonon(0.001)).rho);
    double c_high = 0.0;
    for (double n = 0.7; n <= 2.0 + 1e-12; n += 0.05)
        c_high = std::max(c_high, concurrence(steady_state(strong_phonon(n)).rho));

    double dev_closed = 0.0, dev_diag = 0.0;
    for (int i = 0; i <= 70; ++i) {
        const double n = 0.01 * i;
        const double c = concurrence(steady_state(strong_phonon(n)).rho);
        dev_closed = std::max(dev_closed, std::abs(c - oracle::strong_phonon_limits(n).concurrence));
        dev_diag = std::max(dev_diag, std::abs(c - oracle::strong_phonon_diagonal_concurrence(n)));
    }
    return {c_low >= 0.95 && c_high == 0.0,
            fmt("C(n=0.001) %.4f (>= 0.95); max C for n in [0.7, 2] %.3g (== 0); curve deviation from closed form "
                "%.4f, from diagonal-state form %.4f (recorded)",
                c_low, c_high, dev_closed, dev_diag)};
}

Outcome a8_intensity()
{
    const SystemParams p = reference_rates(5.0, -15.0);
    SystemParams p0 = p;
    p0.gamma_pn = 0.0;
    const double with = intensity(steady_state(p).rho, p);
    const double without = intensity(steady_state(p0).rho, p0);
    return {with < without, fmt("I_s %.4f with phonons vs %.4f without", with, without)};
}

Outcome a9_phonon_rate()
{
    oracle::PhysicalParams phys;
    phys.A = 11e-15;
    phys.omega_c = 3e12;
    const double rate = oracle::phonon_rate(phys, 0.5e12);
    return {rate >= 1e10 && rate <= 5e10, fmt("Gamma = %.4g 1/s (in [1e10, 5e10])", rate)};
}

Outcome a10_concurrence()
{
    random::Engine rng(1010);
    double pure = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto v = random::state_vector(rng);
        const Matrix4c m = v * v.adjoint();
        pure = std::max(pure, std::abs(concurrence_product_basis(m) - 2.0 * std::abs(v(0) * v(3) - v(1) * v(2))));
    }

    double x_state = 0.0;
    for (double n : {0.0, 0.05, 0.3, 0.65, 1.0}) {
        const double den = 1.0 + 4.0 * n;
        const DensityMatrix4 rho = DensityMatrix4::diagonal({n / den, n / den, (1.0 + n) / den, n / den});
        const Matrix4c m = dicke_to_product(rho.matrix());
        const double oracle_c =
            2.0 * std::max({0.0, std::abs(m(1, 2)) - std::sqrt(m(0, 0).real() * m(3, 3).real()),
                            std::abs(m(0, 3)) - std::sqrt(m(1, 1).real() * m(2, 2).real())});
        x_state = std::max(x_state, std::abs(concurrence(rho) - oracle_c));
    }

    double unitary = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Matrix4c m = random::density_matrix(rng).matrix();
        const Matrix4c u = Eigen::kroneckerProduct(random::unitary2(rng), random::unitary2(rng)).eval();
        unitary = std::max(unitary, std::abs(concurrence_product_basis(u * m * u.adjoint()) -
                                             concurrence_product_basis(m)));
    }

    const double endpoints = std::max({std::abs(concurrence(DensityMatrix4::pure(Dicke::a)) - 1.0),
                                       std::abs(concurrence(DensityMatrix4::pure(Dicke::s)) - 1.0),
                                       concurrence(DensityMatrix4::pure(Dicke::g)),
                                       concurrence(DensityMatrix4::pure(Dicke::e))});

    return {pure <= 1e-10 && x_state <= 1e-12 && unitary <= 1e-9 && endpoints <= 1e-12,
            fmt("pure-state %.3g (1e-10); X-state %.3g (1e-12); local unitary %.3g (1e-9); endpoints %.3g (1e-12)", pure,
                x_state, unitary, endpoints)};
}

Outcome a11_determinism()
{
    const GridSpec g = reference_grid(3.0);
    auto csv = [&](unsigned workers) {
        std::ostringstream os;
        cli::sweep_table(sweep_steady(g, workers)).write_csv(os);
        return os.str();
    };
    const std::string one = csv(1);
    const std::string many = csv(8);
    return {one == many, fmt("%zu-byte CSV, 1 worker vs 8 workers: %s", one.size(), one == many ? "identical" : "DIFFERENT")};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"A1", "generator coefficients", 1.0, a1_generator},
        {"A2", "no-drive oracle", 5.0, a2_no_drive},
        {"A3", "steady state cross-method", 30.0, a3_steady_cross},
        {"A4", "phonon-enhanced concurrence", 60.0, a4_contrast},
        {"A5", "transient populations", 5.0, a5_transient},
        {"A6", "strong-phonon populations", 5.0, a6_strong_phonon_populations},
        {"A7", "strong-phonon concurrence endpoints", 10.0, a7_strong_phonon_concurrence},
        {"A8", "intensity suppression", 2.0, a8_intensity},
        {"A9", "phonon rate conversion", 1.0, a9_phonon_rate},
        {"A10", "concurrence properties", 5.0, a10_concurrence},
        {"A11", "sweep determinism", 0.0, a11_determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.body();
        }
        catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = o.passed;
        std::string timing = fmt("%.2fs", secs);
        if (c.budget_s > 0.0) {
            timing += fmt(" of %.0fs", c.budget_s);
            if (secs > c.budget_s) {
                ok = false;
                timing += " OVER BUDGET";
            }
        }
        if (!ok)
            ++failed;
        std::printf("%-4s %s  %s: %s [%s]\n", c.id, ok ? "PASS" : "FAIL", c.title, o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
