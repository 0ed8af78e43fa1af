#ifndef QDPAIR_ORACLE_HPP
#define QDPAIR_ORACLE_HPP

// Closed-form references and SI conversions. Nothing in here depends on the
// Liouvillian assembly in model.hpp, so it can be used to check it.

#include "types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace qdpair::oracle
{

/// CODATA 2018 exact / recommended values, SI.
namespace constants
{
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_B = 1.380649e-23;         // J / K
inline constexpr double epsilon_0 = 8.8541878128e-12; // F / m
} // namespace constants

/// SI inputs for the rate conversions.
struct PhysicalParams
{
    double A = 11e-15;       ///< phonon coupling coefficient, s / K
    double omega_c = 3e12;   ///< phonon cutoff, 1/s
    double T = 4.0;          ///< bath temperature, K
    double zeta = std::numbers::pi / 2; ///< angle between dipole and separation, rad
    double kr = 0.1;         ///< resonant wavenumber times separation
    double k = 1.0e7;        ///< resonant wavenumber in the medium, 1/m
    double d = 1.0e-28;      ///< transition dipole moment, C m
    double epsilon = 12.9;   ///< relative dielectric constant

    void validate() const
    {
        if (!(T > 0.0))
            throw ParameterError("T must be in (0, inf)");
        if (!(omega_c > 0.0))
            throw ParameterError("omega_c must be in (0, inf)");
        if (!(kr > 0.0))
            throw ParameterError("kr must be in (0, inf)");
        if (!(k > 0.0) || !(d > 0.0) || !(epsilon > 0.0))
            throw ParameterError("k, d and epsilon must be in (0, inf)");
        if (!(A >= 0.0))
            throw ParameterError("A must be in [0, inf)");
    }
};

/// Phonon-induced s <-> a rate, Gamma ~ (A hbar / pi k_B) (2 Omega)^3 exp(-(2 Omega / omega_c)^2).
/// Returns 1/s. The sign of omega_dd is ignored.
inline double phonon_rate(const PhysicalParams& phys, double omega_dd)
{
    const double split = 2.0 * std::abs(omega_dd);
    const double prefactor = phys.A * constants::hbar / (std::numbers::pi * constants::k_B);
    const double x = split / phys.omega_c;
    return prefactor * split * split * split * std::exp(-x * x);
}

/// Bose-Einstein occupation at splitting 2 |omega_dd|.
inline double mean_phonon_number(double T, double omega_dd)
{
    if (!(T > 0.0))
        throw ParameterError("T must be in (0, inf)");
    if (omega_dd == 0.0)
        throw ParameterError("omega_dd must be nonzero");
    const double x = 2.0 * constants::hbar * std::abs(omega_dd) / (constants::k_B * T);
    return 1.0 / std::expm1(x);
}

/// Temperature at which mean_phonon_number(T, omega_dd) == n_bar.
inline double temperature_for_occupation(double n_bar, double omega_dd)
{
    if (!(n_bar > 0.0))
        throw ParameterError("n_bar must be in (0, inf)");
    return 2.0 * constants::hbar * std::abs(omega_dd) / (constants::k_B * std::log1p(1.0 / n_bar));
}

/// Static near-field dipole-dipole shift 3 gamma (1 - 3 cos^2 zeta) / 4 (kr)^3.
inline double dipole_dipole_shift(double gamma, double zeta, double kr)
{
    if (!(kr > 0.0))
        throw ParameterError("kr must be in (0, inf)");
    const double c = std::cos(zeta);
    return 3.0 * gamma * (1.0 - 3.0 * c * c) / (4.0 * kr * kr * kr);
}

/// Single-emitter decay rate k^3 d^2 / (6 pi eps eps_0 hbar), 1/s.
inline double spontaneous_rate(const PhysicalParams& phys)
{
    if (!(phys.k > 0.0) || !(phys.d > 0.0) || !(phys.epsilon > 0.0))
        throw ParameterError("k, d and epsilon must be in (0, inf)");
    return phys.k * phys.k * phys.k * phys.d * phys.d /
           (6.0 * std::numbers::pi * phys.epsilon * constants::epsilon_0 * constants::hbar);
}

/// SI rates derived from PhysicalParams.
struct PhysicalRates
{
    double gamma = 0.0;    ///< 1/s
    double omega_dd = 0.0; ///< 1/s, signed
    double gamma_pn = 0.0; ///< 1/s
    double n_bar = 0.0;
};

inline PhysicalRates physical_rates(const PhysicalParams& phys)
{
    phys.validate();
    PhysicalRates r;
    r.gamma = spontaneous_rate(phys);
    r.omega_dd = dipole_dipole_shift(r.gamma, phys.zeta, phys.kr);
    r.gamma_pn = phonon_rate(phys, r.omega_dd);
    r.n_bar = mean_phonon_number(phys.T, r.omega_dd);
    return r;
}

/// Dimensionless model parameters (gamma = 1). chi_r, rabi and detuning are
/// not functions of the physical inputs and pass through unchanged.
inline SystemParams to_system_params(const PhysicalParams& phys, double chi_r, double rabi, double detuning)
{
    const PhysicalRates r = physical_rates(phys);
    SystemParams p;
    p.gamma = 1.0;
    p.chi_r = chi_r;
    p.omega_dd = r.omega_dd / r.gamma;
    p.gamma_pn = r.gamma_pn / r.gamma;
    p.n_bar = r.n_bar;
    p.rabi = rabi;
    p.detuning = detuning;
    p.validate();
    return p;
}

/// Auxiliary rates of the undriven population solution.
struct NoDriveSolutionParams
{
    double Gamma_plus = 0.0;
    double Gamma_minus = 0.0;
    double Omega_bar = 0.0;
    double alpha_bar = 0.0;
    double beta_bar = 0.0;
};

/// Evaluated for the s-above-a ordering (positive shift) with the supplied
/// chi_r; callers handle the negative-shift relabelling.
inline NoDriveSolutionParams no_drive_solution_params(double gamma, double chi_r, double gamma_pn, double n_bar)
{
    NoDriveSolutionParams q;
    const double g = gamma, chi = chi_r, G = gamma_pn, n = n_bar;
    q.Gamma_plus = G * (1.0 + 2.0 * n) + g;
    q.Gamma_minus = G * (1.0 + 2.0 * n) - g;
    const double omega_sq = G * G * (1.0 + 2.0 * n) * (1.0 + 2.0 * n) + g * chi * (2.0 * G + g * chi);
    if (omega_sq < 0.0)
        throw ParameterError("Omega_bar^2 is negative; parameters outside the admissible range");
    q.Omega_bar = std::sqrt(omega_sq);
    const double ob2 = q.Omega_bar * q.Omega_bar;
    q.alpha_bar = q.Gamma_minus * (g * chi * (1.0 + chi) + G * (1.0 + chi - 2.0 * n * (1.0 - chi))) - (1.0 + chi) * ob2;
    q.beta_bar = q.Gamma_minus * (g * chi * (chi - 1.0) - G * (3.0 + chi + 2.0 * n * (1.0 + chi))) - (1.0 - chi) * ob2;
    return q;
}

inline NoDriveSolutionParams no_drive_solution_params(const SystemParams& p)
{
    const double chi = p.omega_dd < 0.0 ? -p.chi_r : p.chi_r;
    return no_drive_solution_params(p.gamma, chi, p.gamma_pn, p.n_bar);
}

namespace detail
{

/// sinh(w t) / w, continuous at w = 0.
inline double sinhc(double w, double t)
{
    const double x = w * t;
    if (std::abs(x) < 1e-6)
        return t * (1.0 + x * x / 6.0);
    return std::sinh(x) / w;
}

inline void check_undriven_diagonal(const SystemParams& p, const std::array<double, 4>& pops0)
{
    p.validate();
    if (p.rabi != 0.0)
        throw ParameterError("closed-form populations require rabi = 0");
    double sum = 0.0;
    for (double v : pops0) {
        if (v < -1e-12)
            throw ParameterError("initial populations must be nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw ParameterError("initial populations must sum to 1");
}

} // namespace detail

/// Closed-form (e, s, a, g) populations without drive, from a diagonal initial
/// state. A negative shift is handled by exchanging the roles of s and a, which
/// amounts to chi_r -> -chi_r in the positive-shift expressions.
inline std::array<double, 4> analytic_populations(const SystemParams& p, const std::array<double, 4>& pops0, double t)
{
    detail::check_undriven_diagonal(p, pops0);
    const bool swapped = p.omega_dd < 0.0;
    const double g = p.gamma, G = p.gamma_pn, n = p.n_bar;
    const double chi = swapped ? -p.chi_r : p.chi_r;
    const double ree0 = pops0[0];
    const double rss0 = swapped ? pops0[2] : pops0[1];
    const double raa0 = swapped ? pops0[1] : pops0[2];

    const NoDriveSolutionParams q = no_drive_solution_params(g, chi, G, n);
    const double denom = q.Gamma_minus * q.Gamma_minus - q.Omega_bar * q.Omega_bar;
    const double scale = std::max({g, G * (1.0 + 2.0 * n), q.Omega_bar});
    if (std::abs(denom) <= 1e-12 * scale * scale)
        throw ParameterError("degenerate rates: 2 gamma coincides with an s/a relaxation rate (Gamma_-^2 = Omega_bar^2)");

    const double ob = q.Omega_bar;
    const double ch = std::cosh(ob * t);
    const double shc = detail::sinhc(ob, t);
    const double ep = std::exp(-q.Gamma_plus * t);
    const double e2 = std::exp(-2.0 * g * t);

    const double r_ss = ep * (shc * (2.0 * n * G * raa0 - (G + g * chi) * rss0) + rss0 * ch) +
                        g * ree0 * ep / denom * (ch * (g * (1.0 + chi) * (1.0 + chi) - 4.0 * n * G) + q.alpha_bar * shc) +
                        g * ree0 * e2 / denom * (4.0 * n * G - g * (1.0 + chi) * (1.0 + chi));

    const double r_aa = ep * (shc * (2.0 * G * (1.0 + n) * rss0 + (G + g * chi) * raa0) + raa0 * ch) +
                        g * ree0 * ep / denom *
                            (ch * (g * (1.0 - chi) * (1.0 - chi) - 4.0 * G * (1.0 + n)) + q.beta_bar * shc) +
                        g * ree0 * e2 / denom * (4.0 * G * (1.0 + n) - g * (1.0 - chi) * (1.0 - chi));

    const double r_ee = ree0 * e2;
    const double r_gg = 1.0 - r_ee - r_ss - r_aa;
    if (swapped)
        return {r_ee, r_aa, r_ss, r_gg};
    return {r_ee, r_ss, r_aa, r_gg};
}

/// 4x4 rate matrix acting on (e, s, a, g) populations without drive.
inline Eigen::Matrix4d population_rate_matrix(const SystemParams& p)
{
    const double g = p.gamma, chi = p.chi_r;
    const double down = 2.0 * p.gamma_pn * (1.0 + p.n_bar);
    const double up = 2.0 * p.gamma_pn * p.n_bar;
    // upper -> lower phonon emission; s is the upper level for a positive shift
    const double s_to_a = p.omega_dd >= 0.0 ? down : up;
    const double a_to_s = p.omega_dd >= 0.0 ? up : down;

    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = -2.0 * g;
    m(1, 0) = g * (1.0 + chi);
    m(2, 0) = g * (1.0 - chi);
    m(1, 1) = -g * (1.0 + chi) - s_to_a;
    m(2, 1) = s_to_a;
    m(3, 1) = g * (1.0 + chi);
    m(2, 2) = -g * (1.0 - chi) - a_to_s;
    m(1, 2) = a_to_s;
    m(3, 2) = g * (1.0 - chi);
    return m;
}

inline std::array<double, 4> matexp_populations(const SystemParams& p, const std::array<double, 4>& pops0, double t)
{
    detail::check_undriven_diagonal(p, pops0);
    const Eigen::Matrix4d m = population_rate_matrix(p);
    const Eigen::Matrix4d prop = (m * t).exp();
    const Eigen::Vector4d v = prop * Eigen::Vector4d(pops0[0], pops0[1], pops0[2], pops0[3]);
    return {v(0), v(1), v(2), v(3)};
}

struct StrongPhononLimit
{
    double r_aa = 0.0;
    double r_ss = 0.0; ///< also R_ee and R_gg
    double concurrence = 0.0;
};

/// Steady state for gamma / Gamma -> 0 with close emitters.
inline StrongPhononLimit strong_phonon_limits(double n_bar)
{
    if (!(n_bar >= 0.0))
        throw ParameterError("n_bar must be in [0, inf)");
    StrongPhononLimit l;
    if (std::isinf(n_bar)) {
        l.r_aa = 0.25;
        l.r_ss = 0.25;
        l.concurrence = 0.0;
        return l;
    }
    const double d = 1.0 + 4.0 * n_bar;
    l.r_aa = (1.0 + n_bar) / d;
    l.r_ss = n_bar / d;
    l.concurrence = std::max(0.0, (std::sqrt((1.0 + n_bar) * (1.0 + 2.0 * n_bar)) - 3.0 * n_bar) / d);
    return l;
}

/// Concurrence of the diagonal state diag(n, n, 1+n, n)/(1+4n) alone:
/// max(0, (1 - 2n) / (1 + 4n)).
inline double strong_phonon_diagonal_concurrence(double n_bar)
{
    return std::max(0.0, (1.0 - 2.0 * n_bar) / (1.0 + 4.0 * n_bar));
}

/// Occupation at which the closed-form strong-phonon concurrence vanishes.
inline double strong_phonon_concurrence_root()
{
    return (3.0 + std::sqrt(37.0)) / 14.0;
}

} // namespace qdpair::oracle

#endif // QDPAIR_ORACLE_HPP
