#ifndef QDPAIR_RANDOM_HPP
#define QDPAIR_RANDOM_HPP

#include "types.hpp"

#include <random>

namespace qdpair::random
{

using Engine = std::mt19937_64;

inline double uniform(Engine& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix4c ginibre(Engine& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix4c g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g(i, j) = Complex(n(rng), n(rng));
    return g;
}

/// Full-rank mixed state G G^dag / Tr.
inline DensityMatrix4 density_matrix(Engine& rng)
{
    const Matrix4c g = ginibre(rng);
    Matrix4c m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix4::assume_valid(0.5 * (m + m.adjoint()));
}

inline Eigen::Matrix<Complex, 4, 1> state_vector(Engine& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix<Complex, 4, 1> v;
    for (int i = 0; i < 4; ++i)
        v(i) = Complex(n(rng), n(rng));
    return v / v.norm();
}

/// Haar-random 2x2 unitary via QR of a Ginibre matrix.
inline Eigen::Matrix2cd unitary2(Engine& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix2cd g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            g(i, j) = Complex(n(rng), n(rng));
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    Eigen::Matrix2cd q = qr.householderQ();
    const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 2; ++i)
        q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

struct ParamBounds
{
    double chi_max = 0.99;
    double omega_dd_max = 30.0;
    double gamma_pn_max = 5.0;
    double n_bar_max = 1.0;
    double rabi_max = 10.0;
    double detuning_max = 40.0;
    bool allow_negative_shift = true;
};

/// Admissible parameters with gamma = 1 and |omega_dd| >= 1.
inline SystemParams system_params(Engine& rng, const ParamBounds& b = {})
{
    SystemParams p;
    p.gamma = 1.0;
    p.chi_r = uniform(rng, 0.0, b.chi_max);
    p.omega_dd = uniform(rng, 1.0, b.omega_dd_max);
    if (b.allow_negative_shift && uniform(rng, 0.0, 1.0) < 0.5)
        p.omega_dd = -p.omega_dd;
    p.gamma_pn = uniform(rng, 0.0, b.gamma_pn_max);
    p.n_bar = uniform(rng, 0.0, b.n_bar_max);
    p.rabi = uniform(rng, 0.0, b.rabi_max);
    p.detuning = uniform(rng, -b.detuning_max, b.detuning_max);
    return p;
}

} // namespace qdpair::random

#endif // QDPAIR_RANDOM_HPP
