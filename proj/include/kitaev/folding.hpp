#pragma once

// Folding of the diagonal Majorana modes onto the bare ones by two-mode
// rotations, and reconstruction of chain eigenstates by replaying the
// rotations in reverse as Fock-space gates on a tensor chain.

#include "errors.hpp"
#include "mixed_canonical.hpp"
#include "quadratic_fermions.hpp"
#include "tensor_chain.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace kitaev {

/// Rotation of Majorana labels (column - 1, column) chosen to clear W(row, column).
/// Labels are 1-based as in g_1 ... g_2N.
struct Rotation {
    int    row;
    int    column;
    double angle;
};

struct FoldingPlan {
    int                   n_sites = 0;
    std::vector<Rotation> rotations; // folding order: row ascending, column descending
    bool                  particle_hole = false;
};

/// W' = W R with R the rotation of columns (j-1, j):
///   W'_j = W_j cos t - W_{j-1} sin t,  W'_{j-1} = W_{j-1} cos t + W_j sin t.
inline void apply_rotation(Eigen::MatrixXd &w, const Rotation &rot) {
    const Eigen::Index j = rot.column - 1, i = rot.column - 2;
    const double       c = std::cos(rot.angle), s = std::sin(rot.angle);
    for(Eigen::Index r = 0; r < w.rows(); ++r) {
        const double wi = w(r, i), wj = w(r, j);
        w(r, i)         = wi * c + wj * s;
        w(r, j)         = wj * c - wi * s;
    }
}

inline Eigen::MatrixXd replay_plan(const FoldingPlan &plan, Eigen::MatrixXd w) {
    for(const auto &rot : plan.rotations) apply_rotation(w, rot);
    return w;
}

inline FoldingPlan compute_folding_plan(const MajoranaSchur &schur, double orthogonality_tol = 1e-9) {
    const Eigen::Index dim = schur.w_matrix.rows();
    if(dim != schur.w_matrix.cols() || dim != 2 * schur.n_sites() || dim < 2)
        throw std::invalid_argument("compute_folding_plan: W must be 2N x 2N");
    if(double r = schur.orthogonality_residual(); r > orthogonality_tol)
        throw NumericalError("compute_folding_plan: W is not orthogonal (residual " + std::to_string(r) + ")");

    FoldingPlan plan;
    plan.n_sites = schur.n_sites();
    plan.rotations.reserve(static_cast<std::size_t>(dim * (dim - 1) / 2));
    Eigen::MatrixXd w = schur.w_matrix;
    for(Eigen::Index row = 0; row + 1 < dim; ++row) {
        for(Eigen::Index col = dim - 1; col > row; --col) {
            const double a = w(row, col - 1), b = w(row, col);
            // atan2 puts sin t with the sign of W_j and cos t with the sign of W_{j-1}.
            double theta = (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(b, a);
            if(theta <= -std::numbers::pi) theta = std::numbers::pi;
            const Rotation rot{static_cast<int>(row + 1), static_cast<int>(col + 1), theta};
            if(theta != 0.0) apply_rotation(w, rot);
            plan.rotations.push_back(rot);
        }
    }
    plan.particle_hole = w(dim - 1, dim - 1) < 0.0;
    return plan;
}

/// diag(e^{i t/2}, e^{-i t/2}) = exp(-i t (n - 1/2)); rotation of the two Majoranas of one site.
inline Eigen::Matrix2cd gate_matrix_even(double theta) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
    u(0, 0)            = std::polar(1.0, 0.5 * theta);
    u(1, 1)            = std::polar(1.0, -0.5 * theta);
    return u;
}

/// Rotation of g_{2l} and g_{2l+1} (sites l, l+1) in the |00>, |01>, |10>, |11> basis.
inline Eigen::Matrix4cd gate_matrix_odd(double theta) {
    const double     c = std::cos(0.5 * theta);
    const cplx       s(0.0, std::sin(0.5 * theta));
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    u(0, 0) = u(1, 1) = u(2, 2) = u(3, 3) = c;
    u(0, 3) = u(3, 0) = u(1, 2) = u(2, 1) = s;
    return u;
}

namespace detail {

inline std::vector<std::uint8_t> reference_bits(int n_sites, const OccupationPattern &occupation, bool particle_hole) {
    if(static_cast<int>(occupation.size()) != n_sites) throw std::invalid_argument("reference_state: occupation length differs from N");
    std::vector<std::uint8_t> bits(occupation.bits().begin(), occupation.bits().end());
    if(particle_hole) bits.back() ^= 1U;
    return bits;
}

} // namespace detail

/// Fock state whose diagonal-mode occupations are `occupation` once the plan is undone.
/// With the particle-hole flag the last site is flipped: the base state is |0...01>.
inline TensorChain reference_state(int n_sites, const OccupationPattern &occupation, bool particle_hole, TruncationPolicy policy = {}) {
    return TensorChain::product_state(detail::reference_bits(n_sites, occupation, particle_hole), policy);
}

/// Apply the plan's rotations in reverse order (row 2N-1 down to 1, column ascending)
/// to the reference state. Each rotation R(t) of the folding acts on states as the
/// gate exp(t/2 g_j g_{j-1}), i.e. gate_matrix_even/odd evaluated at -t.
/// Gates run on a mixed canonical chain; within a row they sweep left to right,
/// so the orthogonality center follows them.
inline TensorChain reconstruct_eigenstate(const FoldingPlan &plan, const OccupationPattern &occupation, TruncationPolicy policy = {}) {
    auto state = MixedCanonicalChain::product_state(detail::reference_bits(plan.n_sites, occupation, plan.particle_hole), policy);
    for(auto it = plan.rotations.rbegin(); it != plan.rotations.rend(); ++it) {
        if(it->angle == 0.0) continue;
        const int j = it->column;
        if(j % 2 == 0)
            state.apply_single_site_gate(static_cast<std::size_t>(j / 2 - 1), gate_matrix_even(-it->angle));
        else
            state.apply_two_site_gate(static_cast<std::size_t>((j - 1) / 2 - 1), gate_matrix_odd(-it->angle));
    }
    return state.to_tensor_chain();
}

} // namespace kitaev
