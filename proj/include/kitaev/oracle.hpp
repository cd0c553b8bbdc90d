#pragma once

// Dense exact diagonalization in the full 2^N Fock space. Slow by construction;
// the reference every other module is checked against.
//
// Basis index: bit (N - j) holds n_j, so site 1 is the most significant bit.
// c_j carries the string (-1)^{n_1 + ... + n_{j-1}}.

#include "errors.hpp"
#include "params.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kitaev::oracle {

using cplx          = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using DenseVector   = Eigen::VectorXcd;

inline constexpr int max_sites = 10;

namespace detail {

inline std::uint32_t site_bit(int n, int site) { return std::uint32_t{1} << (n - site); } // site is 1-based

/// Apply c_site (create = false) or c_site^+ (create = true) to a basis state.
inline std::optional<std::pair<double, std::uint32_t>> apply_ladder(int n, int site, bool create, std::uint32_t state) {
    const std::uint32_t bit = site_bit(n, site);
    if(((state & bit) != 0) == create) return std::nullopt;
    const std::uint32_t before = state & ~((bit << 1) - 1); // sites 1 .. site-1
    const double        sign   = (std::popcount(before) % 2 == 0) ? 1.0 : -1.0;
    return std::make_pair(sign, state ^ bit);
}

struct Ladder {
    int  site;
    bool create;
};

/// Adds coeff * L_1 L_2 ... L_m (rightmost acts first) to h.
inline void add_term(DenseOperator &h, int n, cplx coeff, std::initializer_list<Ladder> ops) {
    const std::vector<Ladder> seq(ops);
    const std::uint32_t       dim = std::uint32_t{1} << n;
    for(std::uint32_t in = 0; in < dim; ++in) {
        double        sign  = 1.0;
        std::uint32_t state = in;
        bool          alive = true;
        for(auto it = seq.rbegin(); it != seq.rend(); ++it) {
            auto r = apply_ladder(n, it->site, it->create, state);
            if(!r) {
                alive = false;
                break;
            }
            sign *= r->first;
            state = r->second;
        }
        if(alive) h(state, in) += coeff * sign;
    }
}

inline void check_sites(int n) {
    if(n < 1 || n > max_sites) throw BudgetError("oracle: N = " + std::to_string(n) + " outside [1, " + std::to_string(max_sites) + "]");
}

} // namespace detail

/// Full Fock-space matrix of the chain Hamiltonian. N = 1 is accepted (on-site term only).
inline DenseOperator dense_hamiltonian(const KitaevParams &p) {
    const int n = p.n_sites;
    detail::check_sites(n);
    const Eigen::Index dim   = Eigen::Index{1} << n;
    DenseOperator      h     = DenseOperator::Zero(dim, dim);
    const cplx         delta = p.pairing();
    using detail::add_term;
    for(int j = 1; j <= n; ++j) {
        add_term(h, n, -p.chemical_potential, {{j, true}, {j, false}});
        h.diagonal().array() += 0.5 * p.chemical_potential;
        if(n == 1) continue;
        if(j == n && p.boundary == Boundary::open) continue;
        const int k = j == n ? 1 : j + 1;
        add_term(h, n, -p.hopping, {{j, true}, {k, false}});
        add_term(h, n, -p.hopping, {{k, true}, {j, false}});
        add_term(h, n, delta, {{j, false}, {k, false}});
        add_term(h, n, std::conj(delta), {{k, true}, {j, true}});
    }
    return h;
}

/// Matrix of c_site (1-based).
inline DenseOperator annihilator(int n, int site) {
    detail::check_sites(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseOperator      c   = DenseOperator::Zero(dim, dim);
    detail::add_term(c, n, 1.0, {{site, false}});
    return c;
}

/// Majorana operator g_k (1-based, k in [1, 2N]) for pairing phase phi.
inline DenseOperator majorana(int n, int k, double phi = 0.0) {
    const int     site = (k + 1) / 2;
    DenseOperator c    = annihilator(n, site);
    const cplx    e    = std::polar(1.0, 0.5 * phi);
    if(k % 2 == 1) return e * c + std::conj(e) * c.adjoint();
    return cplx(0, -1) * e * c + cplx(0, 1) * std::conj(e) * c.adjoint();
}

/// exp(i pi N_hat), diagonal +-1.
inline DenseOperator parity_operator(int n) {
    detail::check_sites(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseOperator      p   = DenseOperator::Zero(dim, dim);
    for(Eigen::Index i = 0; i < dim; ++i) p(i, i) = (std::popcount(static_cast<std::uint32_t>(i)) % 2 == 0) ? 1.0 : -1.0;
    return p;
}

/// End-to-end hopping 2 (c_1 c_N^+ + c_N c_1^+).
inline DenseOperator end_hopping_operator(int n) {
    detail::check_sites(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseOperator      q   = DenseOperator::Zero(dim, dim);
    detail::add_term(q, n, 2.0, {{1, false}, {n, true}});
    detail::add_term(q, n, 2.0, {{n, false}, {1, true}});
    return q;
}

/// Number operator sum_j n_j.
inline DenseOperator number_operator(int n) {
    detail::check_sites(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseOperator      op  = DenseOperator::Zero(dim, dim);
    for(Eigen::Index i = 0; i < dim; ++i) op(i, i) = std::popcount(static_cast<std::uint32_t>(i));
    return op;
}

struct EigenPair {
    double      energy = 0.0;
    DenseVector vector;
    /// Gap to the next level below 1e-9: the lowest level is (numerically) degenerate.
    bool degenerate = false;
};

/// Make the first amplitude with magnitude above 1e-12 real and positive.
inline void fix_phase(DenseVector &v) {
    for(Eigen::Index i = 0; i < v.size(); ++i)
        if(std::abs(v(i)) > 1e-12) {
            v *= std::conj(v(i)) / std::abs(v(i));
            return;
        }
}

inline Eigen::SelfAdjointEigenSolver<DenseOperator> diagonalize(const DenseOperator &h) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
    if(es.info() != Eigen::Success) throw NumericalError("oracle: dense eigensolver failed");
    return es;
}

inline EigenPair ed_ground_state(const DenseOperator &h) {
    const auto es = diagonalize(h);
    EigenPair  gs{es.eigenvalues()(0), es.eigenvectors().col(0), false};
    gs.degenerate = es.eigenvalues().size() > 1 && es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-9;
    fix_phase(gs.vector);
    return gs;
}

inline std::vector<double> ed_spectrum(const DenseOperator &h) {
    const auto es = diagonalize(h);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

inline cplx ed_expectation(const DenseOperator &op, const DenseVector &v) {
    if(op.cols() != v.size() || op.rows() != v.size()) throw std::invalid_argument("ed_expectation: dimension mismatch");
    return v.dot(op * v);
}

/// rho over (site 1, site N) from a dense vector, basis |n_1 n_N>, site 1 first.
inline Eigen::Matrix4cd ends_partial_trace(const DenseVector &v, int n) {
    if(v.size() != (Eigen::Index{1} << n) || n < 2) throw std::invalid_argument("ends_partial_trace: dimension mismatch");
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    const int        mid = n - 2;
    for(std::uint32_t a = 0; a < 2; ++a)
        for(std::uint32_t b = 0; b < 2; ++b)
            for(std::uint32_t ap = 0; ap < 2; ++ap)
                for(std::uint32_t bp = 0; bp < 2; ++bp)
                    for(std::uint32_t m = 0; m < (std::uint32_t{1} << mid); ++m) {
                        const auto i  = (a << (n - 1)) | (m << 1) | b;
                        const auto ip = (ap << (n - 1)) | (m << 1) | bp;
                        rho(2 * a + b, 2 * ap + bp) += v(i) * std::conj(v(ip));
                    }
    return rho;
}

} // namespace kitaev::oracle
