#ifndef QDPAIR_TYPES_HPP
#define QDPAIR_TYPES_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qdpair
{
using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;
using Matrix16c = Eigen::Matrix<Complex, 16, 16>;

inline constexpr Complex kI{0.0, 1.0};

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible range.
class ParameterError : public Error
{
public:
    using Error::Error;
};

/// The density-matrix invariants (Hermitian, unit trace, PSD) do not hold.
class StateError : public Error
{
public:
    using Error::Error;
};

/// Collective two-emitter basis ordering used for every 4x4 matrix.
enum class Dicke : int
{
    e = 0, ///< |ee>
    s = 1, ///< (|eg> + |ge>)/sqrt(2)
    a = 2, ///< (|eg> - |ge>)/sqrt(2)
    g = 3  ///< |gg>
};

constexpr int idx(Dicke d) noexcept { return static_cast<int>(d); }

inline constexpr std::array<const char*, 4> kDickeLabels{"e", "s", "a", "g"};

/// |row><col| in the Dicke basis.
inline Matrix4c transition(Dicke row, Dicke col)
{
    Matrix4c m = Matrix4c::Zero();
    m(idx(row), idx(col)) = 1.0;
    return m;
}

/// Model parameters. Every rate is expressed in units of the single-emitter
/// spontaneous decay rate, so gamma is 1 unless a caller rescales it.
struct SystemParams
{
    double gamma = 1.0;     ///< single-emitter spontaneous decay rate
    double chi_r = 0.0;     ///< radiative coupling, 0 (far apart) .. 1 (close)
    double omega_dd = 0.0;  ///< signed dipole-dipole shift
    double gamma_pn = 0.0;  ///< phonon-induced s<->a decay rate
    double n_bar = 0.0;     ///< mean thermal phonon number at splitting 2|omega_dd|
    double rabi = 0.0;      ///< Rabi frequency
    double detuning = 0.0;  ///< emitter minus laser frequency

    /// Throws ParameterError naming the offending field and its range.
    void validate() const
    {
        auto finite = [](double v, const char* name) {
            if (!std::isfinite(v))
                throw ParameterError(std::string(name) + " must be finite");
        };
        finite(gamma, "gamma");
        finite(chi_r, "chi_r");
        finite(omega_dd, "omega_dd");
        finite(gamma_pn, "gamma_pn");
        finite(n_bar, "n_bar");
        finite(rabi, "rabi");
        finite(detuning, "detuning");
        if (!(gamma > 0.0))
            throw ParameterError("gamma must be in (0, inf)");
        if (chi_r < 0.0 || chi_r > 1.0)
            throw ParameterError("chi_r must be in [0, 1]");
        if (gamma_pn < 0.0)
            throw ParameterError("gamma_pn must be in [0, inf)");
        if (n_bar < 0.0)
            throw ParameterError("n_bar must be in [0, inf)");
        if (rabi < 0.0)
            throw ParameterError("rabi must be in [0, inf)");
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix in the Dicke basis.
///
/// Construction through from_matrix() checks all three invariants; the
/// integrator uses assume_valid() after its own symmetrize/renormalize step and
/// positivity is audited by tests instead.
class DensityMatrix4
{
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-9;

    /// |g><g|.
    DensityMatrix4() : m_(transition(Dicke::g, Dicke::g)) {}

    static DensityMatrix4 from_matrix(const Matrix4c& m)
    {
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kHermitianTol)
            throw StateError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
        const double tr = std::abs(m.trace() - 1.0);
        if (tr > kTraceTol)
            throw StateError("density matrix trace differs from 1 by " + std::to_string(tr));
        DensityMatrix4 rho = assume_valid(0.5 * (m + m.adjoint()));
        const double lam = rho.min_eigenvalue();
        if (lam < -kPositivityTol)
            throw StateError("density matrix has negative eigenvalue " + std::to_string(lam));
        return rho;
    }

    static DensityMatrix4 assume_valid(const Matrix4c& m)
    {
        DensityMatrix4 rho;
        rho.m_ = m;
        return rho;
    }

    static DensityMatrix4 pure(Dicke d)
    {
        return assume_valid(transition(d, d));
    }

    /// Projector onto a normalized state given by Dicke-basis amplitudes.
    static DensityMatrix4 from_state(const Eigen::Matrix<Complex, 4, 1>& psi)
    {
        const double n = psi.norm();
        if (!(n > 0.0))
            throw StateError("state vector has zero norm");
        const Eigen::Matrix<Complex, 4, 1> v = psi / n;
        Matrix4c m = v * v.adjoint();
        return assume_valid(0.5 * (m + m.adjoint()));
    }

    static DensityMatrix4 maximally_mixed()
    {
        return assume_valid(Matrix4c::Identity() * 0.25);
    }

    /// Diagonal state with the given (e, s, a, g) populations.
    static DensityMatrix4 diagonal(const std::array<double, 4>& pops)
    {
        Matrix4c m = Matrix4c::Zero();
        for (int i = 0; i < 4; ++i)
            m(i, i) = pops[static_cast<std::size_t>(i)];
        return from_matrix(m);
    }

    const Matrix4c& matrix() const noexcept { return m_; }
    Complex operator()(Dicke row, Dicke col) const { return m_(idx(row), idx(col)); }
    double population(Dicke d) const { return m_(idx(d), idx(d)).real(); }

    double min_eigenvalue() const
    {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    double purity() const { return (m_ * m_).trace().real(); }

private:
    Matrix4c m_;
};

/// Row-major vectorization: vec(rho)[4*i + j] = rho(i, j).
inline Vector16c vectorize(const Matrix4c& m)
{
    Vector16c v;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            v(4 * i + j) = m(i, j);
    return v;
}

inline Matrix4c unvectorize(const Vector16c& v)
{
    Matrix4c m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m(i, j) = v(4 * i + j);
    return m;
}

} // namespace qdpair

#endif // QDPAIR_TYPES_HPP
