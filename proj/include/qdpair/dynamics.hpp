#ifndef QDPAIR_DYNAMICS_HPP
#define QDPAIR_DYNAMICS_HPP

#include "model.hpp"
#include "types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qdpair
{

class IntegrationError : public Error
{
public:
    IntegrationError(const std::string& what, double time_reached)
        : Error(what), time_reached_(time_reached)
    {
    }
    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

/// The steady-state linear system could not be solved.
class SolverError : public Error
{
public:
    using Error::Error;
};

struct Trajectory
{
    std::vector<double> times;
    std::vector<DensityMatrix4> states;
    SystemParams params;

    /// Hermiticity/trace drift measured at each emitted state, before the
    /// symmetrize-and-renormalize correction was applied.
    std::vector<double> drift;
    /// Number of emitted states whose drift exceeded 10 * tol.
    std::size_t drift_warnings = 0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

struct SteadyState
{
    DensityMatrix4 rho;
    double residual = 0.0; ///< ||L vec(rho)||_2
    bool unique = true;
    int nullity = 1;       ///< numerical dimension of ker L
    std::string diagnostic;
};

namespace detail
{

/// Dormand-Prince 5(4) stepper on vec(rho) with FSAL and error control per
/// unit step: a step of size h is accepted when ||err||_max <= tol * h.
class DormandPrince
{
public:
    /// Steps are capped at stability_radius / ||L||_inf. ||L||_inf bounds the
    /// spectral radius, so every h*lambda stays within that radius. Weakly
    /// damped oscillating modes sit next to the imaginary axis, where the
    /// amplification factor of this scheme exceeds 1 beyond |z| ~ 1; a radius
    /// of 1 is needed when the iteration must contract onto a fixed point.
    DormandPrince(const Matrix16c& generator, Vector16c y0, double tol, double stability_radius = 3.0)
        : l_(generator), y_(std::move(y0)), tol_(tol)
    {
        k1_ = l_ * y_;
        const double scale = std::max(1e-300, l_.cwiseAbs().rowwise().sum().maxCoeff());
        h_max_ = stability_radius / scale;
        h_ = std::min(initial_step(), h_max_);
    }

    double time() const noexcept { return t_; }
    const Vector16c& state() const noexcept { return y_; }
    const Vector16c& derivative() const noexcept { return k1_; }
    std::size_t accepted() const noexcept { return accepted_; }
    std::size_t rejected() const noexcept { return rejected_; }

    void reset_state(const Vector16c& y)
    {
        y_ = y;
        k1_ = l_ * y_;
    }

    /// Advances by one accepted step without passing t_stop. The generator is
    /// time-independent, so the stage nodes never enter.
    void step(double t_stop)
    {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        for (;;) {
            const double remaining = t_stop - t_;
            bool clamped = false;
            double h = h_;
            if (h >= remaining) {
                h = remaining;
                clamped = true;
            }
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
            if (h < floor && !clamped) {
                std::ostringstream os;
                os << "step size underflow at t = " << t_ << " (h = " << h << ")";
                throw IntegrationError(os.str(), t_);
            }

            const Vector16c k2 = l_ * (y_ + h * (a21 * k1_));
            const Vector16c k3 = l_ * (y_ + h * (a31 * k1_ + a32 * k2));
            const Vector16c k4 = l_ * (y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
            const Vector16c k5 = l_ * (y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
            const Vector16c k6 = l_ * (y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vector16c y_new = y_ + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector16c k7 = l_ * y_new;
            const Vector16c err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double err_norm = err.cwiseAbs().maxCoeff();
            const double allowed = tol_ * h;
            const double ratio = err_norm > 0.0 ? allowed / err_norm : std::numeric_limits<double>::infinity();
            double factor = 0.9 * std::pow(ratio, 0.25);
            factor = std::clamp(std::isfinite(factor) ? factor : 5.0, 0.2, 5.0);

            if (err_norm <= allowed) {
                static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
                const Vector16c diff = y_new - y_;
                dense_[0] = y_;
                dense_[1] = diff;
                dense_[2] = h * k1_ - diff;
                dense_[3] = diff - h * k7 - dense_[2];
                dense_[4] = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                t_prev_ = t_;
                t_ = clamped ? t_stop : t_ + h;
                y_ = y_new;
                k1_ = k7;
                ++accepted_;
                // a step shortened to land on t_stop says nothing about the
                // admissible size, so keep the previous proposal
                if (!clamped || factor < 1.0)
                    h_ = std::min(h * factor, h_max_);
                return;
            }
            ++rejected_;
            h_ = h * std::min(factor, 1.0);
            if (h_ < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
                std::ostringstream os;
                os << "step size underflow at t = " << t_ << " (h = " << h_ << ")";
                throw IntegrationError(os.str(), t_);
            }
        }
    }

    /// Continuous extension over the last accepted step, t in [t_prev, t].
    Vector16c dense(double t) const
    {
        const double h = t_ - t_prev_;
        if (h <= 0.0)
            return y_;
        const double th = (t - t_prev_) / h;
        const double th1 = 1.0 - th;
        return dense_[0] + th * (dense_[1] + th1 * (dense_[2] + th * (dense_[3] + th1 * dense_[4])));
    }

    double previous_time() const noexcept { return t_prev_; }

private:
    // starting step heuristic of Hairer, Norsett and Wanner, with the error
    // scale set by tol
    double initial_step() const
    {
        const double d0 = y_.cwiseAbs().maxCoeff() / tol_;
        const double d1 = k1_.cwiseAbs().maxCoeff() / tol_;
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const Vector16c y1 = y_ + h0 * k1_;
        const double d2 = (l_ * y1 - k1_).cwiseAbs().maxCoeff() / (tol_ * h0);
        const double m = std::max(d1, d2);
        const double h1 = m <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / m, 0.2);
        return std::min(100.0 * h0, h1);
    }

    Matrix16c l_;
    Vector16c y_;
    Vector16c k1_;
    double tol_;
    double t_ = 0.0;
    double t_prev_ = 0.0;
    std::array<Vector16c, 5> dense_;
    double h_;
    double h_max_;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

inline void check_tolerance(double tol)
{
    if (!(tol >= 1e-12 && tol <= 1e-3))
        throw ParameterError("tol must be in [1e-12, 1e-3]");
}

/// Symmetrizes and renormalizes; returns the drift that was removed.
inline double correct_state(Vector16c& y)
{
    Matrix4c m = unvectorize(y);
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const Complex tr = m.trace();
    const double drift = std::max(herm, std::abs(tr - 1.0));
    m = 0.5 * (m + m.adjoint());
    m /= m.trace().real();
    y = vectorize(m);
    return drift;
}

inline void emit(Trajectory& traj, double t, Vector16c& y, double tol)
{
    const double drift = correct_state(y);
    traj.drift.push_back(drift);
    if (drift > 10.0 * tol)
        ++traj.drift_warnings;
    traj.times.push_back(t);
    traj.states.push_back(DensityMatrix4::assume_valid(unvectorize(y)));
}

/// Numerical dimension of ker L: singular values below 1e-10 * sigma_max.
inline int nullity(const Matrix16c& l)
{
    Eigen::JacobiSVD<Matrix16c> svd(l);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    int n = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff)
            ++n;
    return n;
}

} // namespace detail

/// Adaptive integration from 0 to t_end, emitting every accepted step.
inline Trajectory propagate(const DensityMatrix4& rho0, const SystemParams& p, double t_end, double tol)
{
    if (!(t_end > 0.0))
        throw ParameterError("t_end must be in (0, inf)");
    detail::check_tolerance(tol);

    const Superoperator16 l = build_liouvillian(p);
    Trajectory traj;
    traj.params = p;
    Vector16c y0 = vectorize(rho0.matrix());
    detail::emit(traj, 0.0, y0, tol);

    detail::DormandPrince dp(l.matrix(), y0, tol);
    while (dp.time() < t_end) {
        dp.step(t_end);
        Vector16c y = dp.state();
        detail::emit(traj, dp.time(), y, tol);
        dp.reset_state(y);
    }
    traj.accepted_steps = dp.accepted();
    traj.rejected_steps = dp.rejected();
    return traj;
}

/// Adaptive integration emitting exactly at the requested times (strictly
/// increasing, nonnegative). A leading 0 emits rho0 itself.
inline Trajectory propagate(const DensityMatrix4& rho0, const SystemParams& p, std::span<const double> times,
                            double tol)
{
    detail::check_tolerance(tol);
    if (times.empty())
        throw ParameterError("times must not be empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1])))
            throw ParameterError("times must be nonnegative and strictly increasing");
    }

    const Superoperator16 l = build_liouvillian(p);
    Trajectory traj;
    traj.params = p;
    Vector16c y0 = vectorize(rho0.matrix());
    // output times do not constrain the step sequence: intermediate targets
    // come from the continuous extension, and only the last one is stepped to
    detail::DormandPrince dp(l.matrix(), y0, tol);
    const double t_last = times.back();
    for (double target : times) {
        while (dp.time() < target)
            dp.step(t_last);
        Vector16c y = target == dp.time() ? dp.state() : dp.dense(target);
        detail::emit(traj, target, y, tol);
    }
    traj.accepted_steps = dp.accepted();
    traj.rejected_steps = dp.rejected();
    return traj;
}

/// Solves L vec(rho) = 0 with Tr rho = 1 by replacing the (e,e) row of L with
/// the trace functional. When ker L is more than one-dimensional the
/// minimum-norm solution of the stacked system is returned with unique = false.
inline SteadyState steady_state(const SystemParams& p)
{
    const Superoperator16 sup = build_liouvillian(p);
    const Matrix16c& l = sup.matrix();

    Eigen::Matrix<Complex, 1, 16> trace_row = Eigen::Matrix<Complex, 1, 16>::Zero();
    for (int i = 0; i < 4; ++i)
        trace_row(5 * i) = 1.0;

    SteadyState out;
    out.nullity = detail::nullity(l);
    Vector16c x;
    if (out.nullity > 1) {
        Eigen::Matrix<Complex, 17, 16> stacked;
        stacked.topRows<16>() = l;
        stacked.row(16) = trace_row;
        Eigen::Matrix<Complex, 17, 1> rhs_vec = Eigen::Matrix<Complex, 17, 1>::Zero();
        rhs_vec(16) = 1.0;
        x = stacked.completeOrthogonalDecomposition().solve(rhs_vec);
        out.unique = false;
        std::ostringstream os;
        os << "steady state is not unique: generator kernel has dimension " << out.nullity
           << "; returned the minimum-norm unit-trace solution";
        out.diagnostic = os.str();
    }
    else if (out.nullity == 0) {
        throw SolverError("generator has trivial kernel; no steady state (is the generator trace-preserving?)");
    }
    else {
        Matrix16c a = l;
        a.row(0) = trace_row;
        Vector16c b = Vector16c::Zero();
        b(0) = 1.0;
        Eigen::FullPivLU<Matrix16c> lu(a);
        if (lu.rank() < 16) {
            std::ostringstream os;
            os << "trace-constrained steady-state system is singular (rank " << lu.rank() << " of 16)";
            throw SolverError(os.str());
        }
        x = lu.solve(b);
        out.unique = true;
    }

    Matrix4c rho = unvectorize(x);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    out.residual = (l * vectorize(rho)).norm();

    if (out.unique) {
        if (out.residual > 1e-9) {
            std::ostringstream os;
            os << "steady-state residual " << out.residual << " exceeds 1e-9";
            throw SolverError(os.str());
        }
        out.rho = DensityMatrix4::from_matrix(rho);
    }
    else {
        out.rho = DensityMatrix4::assume_valid(rho);
    }
    return out;
}

/// Relaxes identity/4 under the master equation until ||rhs(rho)||_max < tol.
/// Used as an independent check of steady_state().
inline SteadyState steady_state_by_evolution(const SystemParams& p, double t_max, double tol)
{
    if (!(t_max > 0.0))
        throw ParameterError("t_max must be in (0, inf)");
    detail::check_tolerance(tol);

    const Superoperator16 sup = build_liouvillian(p);
    Vector16c y = vectorize(DensityMatrix4::maximally_mixed().matrix());
    detail::DormandPrince dp(sup.matrix(), y, tol, 1.0);

    double residual = dp.derivative().cwiseAbs().maxCoeff();
    while (residual >= tol) {
        if (dp.time() >= t_max) {
            std::ostringstream os;
            os << "relaxation did not converge by t = " << t_max << ": final ||rhs||_max = " << residual;
            throw IntegrationError(os.str(), dp.time());
        }
        dp.step(t_max);
        y = dp.state();
        detail::correct_state(y);
        dp.reset_state(y);
        residual = dp.derivative().cwiseAbs().maxCoeff();
    }

    SteadyState out;
    Matrix4c rho = unvectorize(dp.state());
    out.rho = DensityMatrix4::from_matrix(rho);
    out.residual = (sup.matrix() * vectorize(out.rho.matrix())).norm();
    out.nullity = detail::nullity(sup.matrix());
    out.unique = out.nullity == 1;
    if (!out.unique)
        out.diagnostic = "generator kernel has dimension " + std::to_string(out.nullity) +
                         "; relaxed state depends on the initial condition";
    return out;
}

} // namespace qdpair

#endif // QDPAIR_DYNAMICS_HPP
