#ifndef QDPAIR_MODEL_HPP
#define QDPAIR_MODEL_HPP

#include "types.hpp"

#include <cmath>
#include <vector>

namespace qdpair
{

/// Lindblad channel: rate * (L rho L^dag - 1/2 {L^dag L, rho}).
struct JumpChannel
{
    Matrix4c op;
    double rate = 0.0;
};

/// Matrix generating d vec(rho)/dt under the row-major vec() convention.
class Superoperator16
{
public:
    Superoperator16() : m_(Matrix16c::Zero()) {}
    explicit Superoperator16(const Matrix16c& m) : m_(m) {}

    const Matrix16c& matrix() const noexcept { return m_; }
    Vector16c apply(const Vector16c& v) const { return m_ * v; }
    Matrix4c apply(const Matrix4c& rho) const { return unvectorize(m_ * vectorize(rho)); }

private:
    Matrix16c m_;
};

/// H / hbar in rate units. The signed dipole-dipole shift enters the s and a
/// energies directly, which is the same Hamiltonian the s <-> a relabelling
/// produces for a negative shift.
inline Matrix4c build_hamiltonian(const SystemParams& p)
{
    Matrix4c h = Matrix4c::Zero();
    h(idx(Dicke::e), idx(Dicke::e)) = 2.0 * p.detuning;
    h(idx(Dicke::s), idx(Dicke::s)) = p.detuning + p.omega_dd;
    h(idx(Dicke::a), idx(Dicke::a)) = p.detuning - p.omega_dd;
    const double drive = std::sqrt(2.0) * p.rabi;
    h(idx(Dicke::e), idx(Dicke::s)) = drive;
    h(idx(Dicke::s), idx(Dicke::e)) = drive;
    h(idx(Dicke::s), idx(Dicke::g)) = drive;
    h(idx(Dicke::g), idx(Dicke::s)) = drive;
    return h;
}

/// The four dissipation channels, always in this order:
///   0: symmetric radiative cascade   R_se + R_gs, rate gamma (1 + chi_r)
///   1: antisymmetric cascade         R_ae - R_ga, rate gamma (1 - chi_r)
///   2: phonon emission (downhill),   rate 2 Gamma (1 + n_bar)
///   3: phonon absorption (uphill),   rate 2 Gamma n_bar
/// Downhill is s -> a for a positive shift and a -> s for a negative one.
inline std::vector<JumpChannel> build_jump_channels(const SystemParams& p)
{
    p.validate();
    if (p.omega_dd == 0.0 && p.gamma_pn > 0.0)
        throw ParameterError("omega_dd must be nonzero when gamma_pn > 0: phonon rates are defined at the splitting 2|omega_dd|");

    std::vector<JumpChannel> channels;
    channels.reserve(4);
    channels.push_back({transition(Dicke::s, Dicke::e) + transition(Dicke::g, Dicke::s),
                        p.gamma * (1.0 + p.chi_r)});
    channels.push_back({transition(Dicke::a, Dicke::e) - transition(Dicke::g, Dicke::a),
                        p.gamma * (1.0 - p.chi_r)});

    const bool s_above_a = p.omega_dd >= 0.0;
    const Matrix4c down = s_above_a ? transition(Dicke::a, Dicke::s) : transition(Dicke::s, Dicke::a);
    const Matrix4c up = down.transpose();
    channels.push_back({down, 2.0 * p.gamma_pn * (1.0 + p.n_bar)});
    channels.push_back({up, 2.0 * p.gamma_pn * p.n_bar});
    return channels;
}

/// d rho / dt for the full master equation.
inline Matrix4c rhs(const Matrix4c& rho, const Matrix4c& hamiltonian, const std::vector<JumpChannel>& channels)
{
    Matrix4c out = -kI * (hamiltonian * rho - rho * hamiltonian);
    for (const auto& ch : channels) {
        if (ch.rate == 0.0)
            continue;
        const Matrix4c ldl = ch.op.adjoint() * ch.op;
        out += ch.rate * (ch.op * rho * ch.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

inline Matrix4c rhs(const Matrix4c& rho, const SystemParams& p)
{
    return rhs(rho, build_hamiltonian(p), build_jump_channels(p));
}

inline Matrix4c rhs(const DensityMatrix4& rho, const SystemParams& p)
{
    return rhs(rho.matrix(), p);
}

inline Superoperator16 build_liouvillian(const SystemParams& p)
{
    const Matrix4c h = build_hamiltonian(p);
    const auto channels = build_jump_channels(p);
    const Matrix4c id = Matrix4c::Identity();

    // row-major vec: vec(A rho B) = (A kron B^T) vec(rho)
    auto kron = [](const Matrix4c& a, const Matrix4c& b) {
        Matrix16c k;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
        return k;
    };

    Matrix16c l = -kI * (kron(h, id) - kron(id, h.transpose()));
    for (const auto& ch : channels) {
        if (ch.rate == 0.0)
            continue;
        const Matrix4c ldl = ch.op.adjoint() * ch.op;
        l += ch.rate * (kron(ch.op, ch.op.conjugate()) - 0.5 * kron(ldl, id) - 0.5 * kron(id, ldl.transpose()));
    }
    return Superoperator16(l);
}

/// Columns are |e>, |s>, |a>, |g> written in the product basis
/// {|ee>, |eg>, |ge>, |gg>}.
inline Matrix4c dicke_to_product_unitary()
{
    const double r = 1.0 / std::sqrt(2.0);
    Matrix4c t = Matrix4c::Zero();
    t(0, 0) = 1.0;
    t(1, 1) = r;
    t(2, 1) = r;
    t(1, 2) = r;
    t(2, 2) = -r;
    t(3, 3) = 1.0;
    return t;
}

inline Matrix4c dicke_to_product(const Matrix4c& rho)
{
    const Matrix4c t = dicke_to_product_unitary();
    return t * rho * t.adjoint();
}

inline Matrix4c dicke_to_product(const DensityMatrix4& rho)
{
    return dicke_to_product(rho.matrix());
}

inline Matrix4c product_to_dicke(const Matrix4c& rho)
{
    const Matrix4c t = dicke_to_product_unitary();
    return t.adjoint() * rho * t;
}

} // namespace qdpair

#endif // QDPAIR_MODEL_HPP
