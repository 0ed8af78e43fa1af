#ifndef QDPAIR_OBSERVABLES_HPP
#define QDPAIR_OBSERVABLES_HPP

#include "model.hpp"
#include "types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qdpair
{

struct ObservableSet
{
    double concurrence = 0.0;
    std::array<double, 4> populations{}; ///< (R_ee, R_ss, R_aa, R_gg)
    double intensity = 0.0;              ///< scattered intensity, units of gamma
    double purity = 1.0;
};

/// sigma_y (x) sigma_y in the product basis {|ee>, |eg>, |ge>, |gg>}.
inline Matrix4c spin_flip()
{
    Matrix4c yy = Matrix4c::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    return yy;
}

/// Wootters concurrence of a product-basis density matrix.
///
/// Eigenvalues of R = rho (sy x sy) rho* (sy x sy) are real and nonnegative for
/// a physical state; imaginary parts or negative real parts beyond 1e-8 mean
/// the input is not a density matrix and raise StateError.
///
/// The square roots s_i of those eigenvalues are taken as the singular values
/// of A^T (sy x sy) A for rho = A A^dag. Square roots of the eigenvalues
/// themselves lose half the digits at rank-deficient states (1e-16 -> 1e-8).
inline double concurrence_product_basis(const Matrix4c& rho)
{
    static constexpr double kEigenTol = 1e-8;
    const Matrix4c yy = spin_flip();
    const Matrix4c r = rho * yy * rho.conjugate() * yy;

    Eigen::ComplexEigenSolver<Matrix4c> es(r, false);
    if (es.info() != Eigen::Success)
        throw StateError("eigen decomposition of the spin-flipped product failed");
    for (int i = 0; i < 4; ++i) {
        const Complex lam = es.eigenvalues()(i);
        if (std::abs(lam.imag()) > kEigenTol || lam.real() < -kEigenTol) {
            std::ostringstream os;
            os << "invalid density matrix: spin-flip eigenvalue " << lam.real() << (lam.imag() < 0 ? " - " : " + ")
               << std::abs(lam.imag()) << "i";
            throw StateError(os.str());
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix4c> hs(0.5 * (rho + rho.adjoint()));
    const Eigen::Vector4d w = hs.eigenvalues();
    if (w.minCoeff() < -kEigenTol) {
        std::ostringstream os;
        os << "invalid density matrix: eigenvalue " << w.minCoeff();
        throw StateError(os.str());
    }
    const Matrix4c a = hs.eigenvectors() * w.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const Matrix4c m = a.transpose() * yy * a;
    // singular values come sorted in decreasing order
    const Eigen::Vector4d s = Eigen::JacobiSVD<Matrix4c>(m).singularValues();
    const double c = s(0) - s(1) - s(2) - s(3);
    return std::clamp(c, 0.0, 1.0);
}

inline double concurrence(const DensityMatrix4& rho)
{
    return concurrence_product_basis(dicke_to_product(rho.matrix()));
}

inline std::array<double, 4> populations(const DensityMatrix4& rho)
{
    return {rho.population(Dicke::e), rho.population(Dicke::s), rho.population(Dicke::a),
            rho.population(Dicke::g)};
}

inline double intensity(const DensityMatrix4& rho, const SystemParams& p)
{
    return p.gamma * ((1.0 + p.chi_r) * rho.population(Dicke::s) + (1.0 - p.chi_r) * rho.population(Dicke::a) +
                      2.0 * rho.population(Dicke::e));
}

inline ObservableSet observe(const DensityMatrix4& rho, const SystemParams& p)
{
    ObservableSet o;
    o.concurrence = concurrence(rho);
    o.populations = populations(rho);
    o.intensity = intensity(rho, p);
    o.purity = rho.purity();
    return o;
}

} // namespace qdpair

#endif // QDPAIR_OBSERVABLES_HPP
