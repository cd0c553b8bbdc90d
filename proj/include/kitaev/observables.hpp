#pragma once

#include "params.hpp"
#include "tensor_chain.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace kitaev {

namespace local {

/// Annihilator on one site in the |0>, |1> basis.
inline Eigen::Matrix2cd annihilator() {
    Eigen::Matrix2cd a = Eigen::Matrix2cd::Zero();
    a(0, 1)            = 1.0;
    return a;
}

inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd &l, const Eigen::Matrix2cd &r) {
    Eigen::Matrix4cd out;
    for(int i = 0; i < 2; ++i)
        for(int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = l(i, j) * r;
    return out;
}

/// c on the left site of a neighbour pair.
inline Eigen::Matrix4cd c_left() { return kron(annihilator(), Eigen::Matrix2cd::Identity()); }

/// c on the right site; carries the (-1)^{n_left} string.
inline Eigen::Matrix4cd c_right() {
    Eigen::Matrix2cd z = Eigen::Matrix2cd::Identity();
    z(1, 1)            = -1.0;
    return kron(z, annihilator());
}

} // namespace local

/// Two-site Hamiltonian of the bond (j, j+1) with the on-site term of each site
/// weighted by mu_weight_left / mu_weight_right.
inline Eigen::Matrix4cd bond_hamiltonian(const KitaevParams &p, double mu_weight_left, double mu_weight_right) {
    const Eigen::Matrix4cd cl = local::c_left(), cr = local::c_right();
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
    const cplx             delta = p.pairing();
    Eigen::Matrix4cd       h     = -p.hopping * (cl.adjoint() * cr + cr.adjoint() * cl);
    h -= p.chemical_potential * (mu_weight_left * (cl.adjoint() * cl - 0.5 * id) + mu_weight_right * (cr.adjoint() * cr - 0.5 * id));
    h += delta * (cl * cr) + std::conj(delta) * (cr.adjoint() * cl.adjoint());
    return h;
}

/// <H> from neighbour-pair density matrices.
///
/// Open chains sum every bond, each on-site term split evenly over the bonds
/// touching its site. Periodic chains use N times the energy of the first bond,
/// which requires a translation-invariant (nondegenerate) eigenstate; pass
/// degenerate = true to have the shortcut refused.
inline double energy_expectation(const TensorChain &state, const KitaevParams &p, bool degenerate = false) {
    const auto n = state.size();
    if(static_cast<int>(n) != p.n_sites) throw std::invalid_argument("energy_expectation: state and parameters disagree on N");
    if(n < 2) throw std::invalid_argument("energy_expectation: needs at least 2 sites");
    if(p.boundary == Boundary::periodic) {
        if(degenerate) throw std::domain_error("energy_expectation: periodic shortcut needs a nondegenerate eigenstate");
        if(n < 3) throw std::invalid_argument("energy_expectation: periodic shortcut needs N >= 3");
        return static_cast<double>(n) * rdm_pair(state, 0).expectation(bond_hamiltonian(p, 0.5, 0.5)).real();
    }
    double e = 0.0;
    for(std::size_t b = 0; b + 1 < n; ++b) {
        const double wl = b == 0 ? 1.0 : 0.5;
        const double wr = b + 2 == n ? 1.0 : 0.5;
        e += rdm_pair(state, b).expectation(bond_hamiltonian(p, wl, wr)).real();
    }
    return e;
}

} // namespace kitaev
