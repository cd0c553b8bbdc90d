#pragma once

// Canonical tensor-chain state of N fermionic sites.
//
// The state is |psi> = sum B_1^{k1} B_2^{k2} ... B_N^{kN} |k1 ... kN>, where
// B_s^k = Gamma_s^k diag(lambda_{s+1}) and lambda_s are the Schmidt values of
// the bond left of site s. Storing B instead of Gamma keeps every update free
// of divisions by small Schmidt values; gamma() recovers the Gamma form.
//
// Fock basis convention: |n_1 ... n_N> = (c_1^+)^{n_1} ... (c_N^+)^{n_N} |0>,
// so two-site operators on neighbours carry the sign (-1)^{n_left} only and
// act as plain 4x4 matrices in the |00>, |01>, |10>, |11> order (left site first).

#include "errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#ifdef KITAEV_USE_LAPACKE
#include <lapacke.h>
#endif

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kitaev {

using cplx = std::complex<double>;

struct TruncationPolicy {
    /// Singular values below this fraction of the largest one are dropped.
    double      relative_threshold = 1e-12;
    std::size_t max_bond           = 1024;
};

/// Reduced density matrix of one site (dim 2) or of two sites (dim 4, first slot = left/first site).
struct DensityBlock {
    Eigen::MatrixXcd rho;

    [[nodiscard]] int    dim() const { return static_cast<int>(rho.rows()); }
    [[nodiscard]] cplx   trace() const { return rho.trace(); }
    [[nodiscard]] double hermiticity_residual() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    [[nodiscard]] cplx expectation(const Eigen::MatrixXcd &op) const { return (rho * op).trace(); }
};

namespace detail {

enum class GateParity { preserving, flipping, mixed };

inline GateParity classify_gate(const Eigen::MatrixXcd &u, int local_sites) {
    constexpr double zero = 1e-14;
    bool             even = true, odd = true;
    for(Eigen::Index r = 0; r < u.rows(); ++r)
        for(Eigen::Index c = 0; c < u.cols(); ++c) {
            if(std::abs(u(r, c)) <= zero) continue;
            int pr = 0, pc = 0;
            for(int s = 0; s < local_sites; ++s) {
                pr ^= static_cast<int>((r >> s) & 1);
                pc ^= static_cast<int>((c >> s) & 1);
            }
            (pr == pc ? odd : even) = false;
        }
    if(even) return GateParity::preserving;
    if(odd) return GateParity::flipping;
    return GateParity::mixed;
}

struct ThinSvd {
    Eigen::MatrixXcd u;
    Eigen::VectorXd  s;
    Eigen::MatrixXcd v;
};

/// max of |U S V^+ - M| / max(1, |M|) and the orthonormality defects of U and V.
inline double svd_defect(const Eigen::MatrixXcd &m, const ThinSvd &f) {
    if(!f.s.allFinite() || !f.u.allFinite() || !f.v.allFinite()) return std::numeric_limits<double>::infinity();
    const Eigen::Index k     = f.s.size();
    const double       scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double       rec   = (f.u * f.s.asDiagonal() * f.v.adjoint() - m).cwiseAbs().maxCoeff() / scale;
    const double       ou    = (f.u.adjoint() * f.u - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
    const double       ov    = (f.v.adjoint() * f.v - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
    return std::max({rec, ou, ov});
}

inline ThinSvd eigen_svd(const Eigen::MatrixXcd &m) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if(svd.info() != Eigen::Success) throw NumericalError("thin_svd: SVD failed");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

#ifdef KITAEV_USE_LAPACKE
inline ThinSvd lapack_svd(Eigen::MatrixXcd m, bool divide_and_conquer) {
    const Eigen::Index rows = m.rows(), cols = m.cols(), k = std::min(rows, cols);
    ThinSvd            out{Eigen::MatrixXcd(rows, k), Eigen::VectorXd(k), Eigen::MatrixXcd()};
    Eigen::MatrixXcd   vt(k, cols);
    auto              *a  = reinterpret_cast<lapack_complex_double *>(m.data());
    auto              *u  = reinterpret_cast<lapack_complex_double *>(out.u.data());
    auto              *v  = reinterpret_cast<lapack_complex_double *>(vt.data());
    const auto         r  = static_cast<lapack_int>(rows), c = static_cast<lapack_int>(cols), kk = static_cast<lapack_int>(k);
    lapack_int         info = 0;
    if(divide_and_conquer) {
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', r, c, a, r, out.s.data(), u, r, v, kk);
    } else {
        std::vector<double> superb(static_cast<std::size_t>(std::max<Eigen::Index>(k, 1)));
        info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', r, c, a, r, out.s.data(), u, r, v, kk, superb.data());
    }
    if(info != 0) out.s.setConstant(std::numeric_limits<double>::quiet_NaN());
    out.v = vt.adjoint();
    return out;
}
#endif

/// Thin SVD, singular values non-increasing. Every factorization is checked:
/// zgesdd from LAPACK 3.10 can return a wrong U with info = 0, so a failed check
/// falls back to zgesvd and then to Eigen's BDCSVD.
inline ThinSvd thin_svd(Eigen::MatrixXcd m) {
    constexpr double tol = 1e-11;
#ifdef KITAEV_USE_LAPACKE
    for(bool dc : {true, false}) {
        auto f = lapack_svd(m, dc);
        if(svd_defect(m, f) <= tol) return f;
    }
#endif
    auto f = eigen_svd(m);
    if(double d = svd_defect(m, f); !(d <= tol)) throw NumericalError("thin_svd: factorization defect " + std::to_string(d));
    return f;
}

inline double unitarity_residual(const Eigen::MatrixXcd &u) {
    return (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

} // namespace detail

class TensorChain {
  public:
    /// Product state with the given site occupations (bond dimension 1 everywhere).
    static TensorChain product_state(std::span<const std::uint8_t> occupations, TruncationPolicy policy = {}) {
        if(occupations.empty()) throw std::invalid_argument("TensorChain: at least one site required");
        TensorChain tc;
        tc.policy_ = policy;
        const auto n = occupations.size();
        tc.b_.resize(n);
        tc.lambda_.assign(n + 1, Eigen::VectorXd::Ones(1));
        tc.labels_.assign(n + 1, std::vector<std::uint8_t>{0});
        std::uint8_t prefix = 0;
        for(std::size_t s = 0; s < n; ++s) {
            if(occupations[s] > 1) throw std::invalid_argument("TensorChain: occupations must be 0 or 1");
            tc.b_[s][0]           = Eigen::MatrixXcd::Zero(1, 1);
            tc.b_[s][1]           = Eigen::MatrixXcd::Zero(1, 1);
            tc.b_[s][occupations[s]](0, 0) = 1.0;
            prefix ^= occupations[s];
            tc.labels_[s + 1][0] = prefix;
        }
        return tc;
    }

    static TensorChain vacuum(std::size_t n, TruncationPolicy policy = {}) {
        return product_state(std::vector<std::uint8_t>(n, 0), policy);
    }

    /// Assemble from explicit Gamma tensors and internal-bond Schmidt values.
    /// gammas[s][k] has shape (dim of bond s) x (dim of bond s+1); boundary bonds have dimension 1.
    static TensorChain from_gammas(const std::vector<std::array<Eigen::MatrixXcd, 2>> &gammas, const std::vector<Eigen::VectorXd> &internal_lambdas,
                                   TruncationPolicy policy = {}) {
        const auto n = gammas.size();
        if(n == 0 || internal_lambdas.size() + 1 != n) throw std::invalid_argument("TensorChain::from_gammas: need N site tensors and N-1 bonds");
        TensorChain tc;
        tc.policy_ = policy;
        tc.lambda_.assign(n + 1, Eigen::VectorXd::Ones(1));
        for(std::size_t b = 0; b + 1 < n; ++b) tc.lambda_[b + 1] = internal_lambdas[b];
        tc.b_.resize(n);
        for(std::size_t s = 0; s < n; ++s) {
            for(int k = 0; k < 2; ++k) {
                const auto &g = gammas[s][static_cast<std::size_t>(k)];
                if(g.rows() != tc.lambda_[s].size() || g.cols() != tc.lambda_[s + 1].size() || gammas[s][1 - k].rows() != g.rows() ||
                   gammas[s][1 - k].cols() != g.cols())
                    throw std::invalid_argument("TensorChain::from_gammas: inconsistent tensor shapes at site " + std::to_string(s));
                tc.b_[s][static_cast<std::size_t>(k)] = g * tc.lambda_[s + 1].asDiagonal();
            }
        }
        tc.tracked_ = false;
        return tc;
    }

    /// Assemble from right-canonical B tensors, the Schmidt values of all N+1 bonds
    /// and the parity label of every bond index.
    static TensorChain from_right_canonical(std::vector<std::array<Eigen::MatrixXcd, 2>> b, std::vector<Eigen::VectorXd> lambda,
                                            std::vector<std::vector<std::uint8_t>> labels, TruncationPolicy policy = {}, double discarded = 0.0) {
        const auto n = b.size();
        if(n == 0 || lambda.size() != n + 1 || labels.size() != n + 1)
            throw std::invalid_argument("TensorChain::from_right_canonical: need N site tensors and N+1 bonds");
        for(std::size_t s = 0; s < n; ++s)
            for(const auto &t : b[s])
                if(t.rows() != lambda[s].size() || t.cols() != lambda[s + 1].size() || labels[s].size() != static_cast<std::size_t>(t.rows()))
                    throw std::invalid_argument("TensorChain::from_right_canonical: inconsistent shapes at site " + std::to_string(s));
        TensorChain tc;
        tc.policy_    = policy;
        tc.b_         = std::move(b);
        tc.lambda_    = std::move(lambda);
        tc.labels_    = std::move(labels);
        tc.discarded_ = discarded;
        return tc;
    }

    [[nodiscard]] std::size_t size() const { return b_.size(); }

    /// Schmidt values of bond `bond` in [0, N]; bond s sits left of site s, bonds 0 and N are trivial.
    [[nodiscard]] const Eigen::VectorXd &lambda(std::size_t bond) const { return lambda_.at(bond); }
    [[nodiscard]] std::size_t            bond_dimension(std::size_t bond) const { return static_cast<std::size_t>(lambda_.at(bond).size()); }
    [[nodiscard]] std::size_t            max_bond_dimension() const {
        std::size_t m = 1;
        for(const auto &l : lambda_) m = std::max(m, static_cast<std::size_t>(l.size()));
        return m;
    }

    /// Right-canonical site tensor B_s^k = Gamma_s^k diag(lambda_{s+1}).
    [[nodiscard]] const Eigen::MatrixXcd &site_tensor(std::size_t site, int k) const { return b_.at(site).at(static_cast<std::size_t>(k)); }

    [[nodiscard]] Eigen::MatrixXcd gamma(std::size_t site, int k) const {
        return site_tensor(site, k) * lambda_[site + 1].cwiseInverse().asDiagonal();
    }

    [[nodiscard]] const TruncationPolicy &truncation() const { return policy_; }
    void                                  set_truncation(TruncationPolicy p) { policy_ = p; }

    /// Accumulated squared weight of discarded Schmidt values.
    [[nodiscard]] double discarded_weight() const { return discarded_; }

    /// Whether every bond index carries a definite parity label (true while only
    /// parity-preserving or parity-flipping gates have been applied).
    [[nodiscard]] bool parity_tracked() const { return tracked_; }

    /// Global fermion parity (0 even, 1 odd) when tracked.
    [[nodiscard]] std::optional<int> parity() const {
        if(!tracked_) return std::nullopt;
        return static_cast<int>(labels_.back().front());
    }

    void apply_single_site_gate(std::size_t site, const Eigen::Matrix2cd &u) {
        check_site(site);
        if(double r = detail::unitarity_residual(u); r > 1e-10)
            throw std::invalid_argument("apply_single_site_gate: gate is not unitary (residual " + std::to_string(r) + ")");
        auto                 &b  = b_[site];
        const Eigen::MatrixXcd b0 = b[0], b1 = b[1];
        b[0]                      = u(0, 0) * b0 + u(0, 1) * b1;
        b[1]                      = u(1, 0) * b0 + u(1, 1) * b1;
        if(!tracked_) return;
        switch(detail::classify_gate(u, 1)) {
            case detail::GateParity::preserving: break;
            case detail::GateParity::flipping: flip_labels_from(site + 1); break;
            case detail::GateParity::mixed: drop_labels(); break;
        }
    }

    void apply_two_site_gate(std::size_t left, const Eigen::Matrix4cd &u) { apply_two_site_gate(left, u, policy_.relative_threshold); }

    /// Contract lambda_left B_l B_{l+1} with u, split by SVD, keep singular values
    /// above threshold * max, renormalize. Only B_l, B_{l+1} and lambda_{l+1} change.
    void apply_two_site_gate(std::size_t left, const Eigen::Matrix4cd &u, double threshold) {
        if(left + 1 >= size()) throw std::out_of_range("apply_two_site_gate: left site " + std::to_string(left) + " has no right neighbour");
        if(double r = detail::unitarity_residual(u); r > 1e-10)
            throw std::invalid_argument("apply_two_site_gate: gate is not unitary (residual " + std::to_string(r) + ")");
        if(tracked_) {
            switch(detail::classify_gate(u, 2)) {
                case detail::GateParity::preserving: break;
                case detail::GateParity::flipping: flip_labels_from(left + 2); break;
                case detail::GateParity::mixed: drop_labels(); break;
            }
        }

        const std::size_t   r   = left + 1;
        const Eigen::Index  dl  = lambda_[left].size();
        const Eigen::Index  dr  = lambda_[r + 1].size();
        const auto         &lam = lambda_[left];

        // theta(J, K) = sum_jk u(JK, jk) B_l^j B_r^k, stored as a (2 dl) x (2 dr) block matrix.
        // All four products B_l^j B_r^k from one multiplication: block (j, k) of [B_l^0; B_l^1] [B_r^0, B_r^1].
        const Eigen::Index dm = lambda_[r].size();
        Eigen::MatrixXcd   bl(2 * dl, dm), br(dm, 2 * dr);
        bl << b_[left][0], b_[left][1];
        br << b_[r][0], b_[r][1];
        const Eigen::MatrixXcd prod  = bl * br;
        Eigen::MatrixXcd       theta = Eigen::MatrixXcd::Zero(2 * dl, 2 * dr);
        for(int jk_out = 0; jk_out < 4; ++jk_out) {
            const int J = jk_out >> 1, K = jk_out & 1;
            auto      blk = theta.block(J * dl, K * dr, dl, dr);
            for(int jk_in = 0; jk_in < 4; ++jk_in)
                if(u(jk_out, jk_in) != cplx(0.0)) blk += u(jk_out, jk_in) * prod.block((jk_in >> 1) * dl, (jk_in & 1) * dr, dl, dr);
        }
        Eigen::MatrixXcd m = theta;
        for(int J = 0; J < 2; ++J) m.middleRows(J * dl, dl) = lam.asDiagonal() * theta.middleRows(J * dl, dl);

        // Sector decomposition: rows (J, xi) carry left parity label(xi) ^ J, columns
        // (K, nu) carry label(nu) ^ K. Parity-definite states make M block diagonal.
        std::array<std::vector<Eigen::Index>, 2> rows_of, cols_of;
        if(tracked_) {
            for(int J = 0; J < 2; ++J)
                for(Eigen::Index x = 0; x < dl; ++x) rows_of[labels_[left][static_cast<std::size_t>(x)] ^ J].push_back(J * dl + x);
            for(int K = 0; K < 2; ++K)
                for(Eigen::Index y = 0; y < dr; ++y) cols_of[labels_[r + 1][static_cast<std::size_t>(y)] ^ K].push_back(K * dr + y);
        } else {
            rows_of[0].resize(static_cast<std::size_t>(2 * dl));
            cols_of[0].resize(static_cast<std::size_t>(2 * dr));
            std::iota(rows_of[0].begin(), rows_of[0].end(), Eigen::Index{0});
            std::iota(cols_of[0].begin(), cols_of[0].end(), Eigen::Index{0});
        }

        struct Triple {
            double          sigma;
            std::uint8_t    sector;
            Eigen::VectorXcd v; // right singular vector in the full (2 dr) column space
        };
        std::vector<Triple> triples;
        double              total_weight = 0.0;
        for(std::uint8_t s = 0; s < 2; ++s) {
            const auto &ri = rows_of[s];
            const auto &ci = cols_of[s];
            if(ri.empty() || ci.empty()) continue;
            Eigen::MatrixXcd sub(static_cast<Eigen::Index>(ri.size()), static_cast<Eigen::Index>(ci.size()));
            for(std::size_t a = 0; a < ri.size(); ++a)
                for(std::size_t c = 0; c < ci.size(); ++c) sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = m(ri[a], ci[c]);
            const auto  svd = detail::thin_svd(std::move(sub));
            const auto &sv  = svd.s;
            for(Eigen::Index i = 0; i < sv.size(); ++i) {
                total_weight += sv(i) * sv(i);
                if(!(sv(i) > 0.0)) continue;
                // Fix the phase so the first non-negligible entry of the left vector is real positive.
                cplx phase = 1.0;
                for(Eigen::Index a = 0; a < svd.u.rows(); ++a)
                    if(std::abs(svd.u(a, i)) > 1e-12) {
                        phase = svd.u(a, i) / std::abs(svd.u(a, i));
                        break;
                    }
                Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * dr);
                for(std::size_t c = 0; c < ci.size(); ++c) v(ci[c]) = svd.v(static_cast<Eigen::Index>(c), i) * std::conj(phase);
                triples.push_back({sv(i), s, std::move(v)});
            }
        }
        std::stable_sort(triples.begin(), triples.end(), [](const Triple &a, const Triple &b) {
            if(std::abs(a.sigma - b.sigma) > 1e-14) return a.sigma > b.sigma;
            return a.sector < b.sector;
        });
        if(triples.empty() || triples.front().sigma < 1e-150)
            throw NumericalError("apply_two_site_gate: all singular values vanished at bond " + std::to_string(r));

        const double cutoff = threshold * triples.front().sigma;
        std::size_t  keep   = 0;
        double       kept   = 0.0;
        while(keep < triples.size() && triples[keep].sigma > cutoff) {
            kept += triples[keep].sigma * triples[keep].sigma;
            ++keep;
        }
        if(keep > policy_.max_bond)
            throw BondOverflowError("apply_two_site_gate: bond " + std::to_string(r) + " needs dimension " + std::to_string(keep) + " > cap " +
                                    std::to_string(policy_.max_bond));
        discarded_ += (total_weight - kept) / total_weight;
        const double norm = std::sqrt(kept);

        const auto       chi = static_cast<Eigen::Index>(keep);
        Eigen::MatrixXcd v(2 * dr, chi);
        Eigen::VectorXd  new_lambda(chi);
        std::vector<std::uint8_t> new_labels(keep);
        for(std::size_t i = 0; i < keep; ++i) {
            v.col(static_cast<Eigen::Index>(i)) = triples[i].v;
            new_lambda(static_cast<Eigen::Index>(i)) = triples[i].sigma / norm;
            new_labels[i]                            = triples[i].sector;
        }
        Eigen::MatrixXcd left_new = theta * v / norm; // (2 dl) x chi, equals Gamma_l lambda_new
        for(int J = 0; J < 2; ++J) b_[left][static_cast<std::size_t>(J)] = left_new.middleRows(J * dl, dl);
        const Eigen::MatrixXcd vh = v.adjoint(); // chi x (2 dr)
        for(int K = 0; K < 2; ++K) b_[r][static_cast<std::size_t>(K)] = vh.middleCols(K * dr, dr);
        lambda_[r] = std::move(new_lambda);
        if(tracked_) labels_[r] = std::move(new_labels);
    }

    /// max over bonds of |sum lambda^2 - 1|.
    [[nodiscard]] double normalization_residual() const {
        double res = 0.0;
        for(const auto &l : lambda_) res = std::max(res, std::abs(l.squaredNorm() - 1.0));
        return res;
    }

    /// Orthonormality of the left and right Schmidt vectors built from the tensors:
    /// sum_k B^k B^k+ = 1 and sum_k B^k+ diag(lambda_l^2) B^k = diag(lambda_r^2).
    [[nodiscard]] double canonical_residual() const {
        double res = 0.0;
        for(std::size_t s = 0; s < size(); ++s) {
            const auto      &b0 = b_[s][0];
            const auto      &b1 = b_[s][1];
            Eigen::MatrixXcd right = b0 * b0.adjoint() + b1 * b1.adjoint();
            res                    = std::max(res, (right - Eigen::MatrixXcd::Identity(right.rows(), right.cols())).cwiseAbs().maxCoeff());
            const Eigen::VectorXd l2 = lambda_[s].cwiseAbs2();
            Eigen::MatrixXcd      left = b0.adjoint() * l2.asDiagonal() * b0 + b1.adjoint() * l2.asDiagonal() * b1;
            left.diagonal() -= lambda_[s + 1].cwiseAbs2().cast<cplx>();
            res = std::max(res, left.cwiseAbs().maxCoeff());
        }
        return res;
    }

  private:
    void check_site(std::size_t site) const {
        if(site >= size()) throw std::out_of_range("TensorChain: site " + std::to_string(site) + " out of range");
    }
    void flip_labels_from(std::size_t bond) {
        for(std::size_t b = bond; b < labels_.size(); ++b)
            for(auto &x : labels_[b]) x ^= 1U;
    }
    void drop_labels() {
        tracked_ = false;
        labels_.clear();
    }

    std::vector<std::array<Eigen::MatrixXcd, 2>> b_;
    std::vector<Eigen::VectorXd>                 lambda_;
    std::vector<std::vector<std::uint8_t>>       labels_;
    bool                                         tracked_   = true;
    double                                       discarded_ = 0.0;
    TruncationPolicy                             policy_;
};

// ---------------------------------------------------------------------------
// Measurements

inline DensityBlock rdm_site(const TensorChain &state, std::size_t site) {
    if(site >= state.size()) throw std::out_of_range("rdm_site: site out of range");
    const auto            &lam = state.lambda(site);
    const Eigen::MatrixXcd x0  = lam.asDiagonal() * state.site_tensor(site, 0);
    const Eigen::MatrixXcd x1  = lam.asDiagonal() * state.site_tensor(site, 1);
    DensityBlock           out{Eigen::MatrixXcd(2, 2)};
    const std::array<const Eigen::MatrixXcd *, 2> x{&x0, &x1};
    for(int k = 0; k < 2; ++k)
        for(int kp = 0; kp < 2; ++kp) out.rho(k, kp) = (x[static_cast<std::size_t>(k)]->array() * x[static_cast<std::size_t>(kp)]->array().conjugate()).sum();
    return out;
}

inline DensityBlock rdm_pair(const TensorChain &state, std::size_t left) {
    if(left + 1 >= state.size()) throw std::out_of_range("rdm_pair: left site has no right neighbour");
    const auto                     &lam = state.lambda(left);
    std::array<Eigen::MatrixXcd, 4> y;
    for(int j = 0; j < 2; ++j)
        for(int k = 0; k < 2; ++k)
            y[static_cast<std::size_t>(2 * j + k)] = lam.asDiagonal() * state.site_tensor(left, j) * state.site_tensor(left + 1, k);
    DensityBlock out{Eigen::MatrixXcd(4, 4)};
    for(int a = 0; a < 4; ++a)
        for(int b = 0; b < 4; ++b) out.rho(a, b) = (y[static_cast<std::size_t>(a)].array() * y[static_cast<std::size_t>(b)].array().conjugate()).sum();
    return out;
}

/// Reduced density matrix of the two chain ends (site 1 first), contracting the
/// bulk transfer matrices sum_k B^k (x) conj(B^k) into one connecting matrix.
inline DensityBlock rdm_ends(const TensorChain &state, std::size_t contraction_budget = 4096) {
    const auto n = state.size();
    if(n < 3) throw std::invalid_argument("rdm_ends: needs at least 3 sites");
    if(state.max_bond_dimension() > contraction_budget)
        throw BudgetError("rdm_ends: bond dimension " + std::to_string(state.max_bond_dimension()) + " exceeds contraction budget");
    // env[a][a'](mu, mu') accumulates B_1^a ... (x) conj(B_1^a' ...).
    std::array<std::array<Eigen::MatrixXcd, 2>, 2> env;
    for(int a = 0; a < 2; ++a)
        for(int ap = 0; ap < 2; ++ap)
            env[static_cast<std::size_t>(a)][static_cast<std::size_t>(ap)] = state.site_tensor(0, a).transpose() * state.site_tensor(0, ap).conjugate();
    for(std::size_t s = 1; s + 1 < n; ++s) {
        const auto &b0 = state.site_tensor(s, 0);
        const auto &b1 = state.site_tensor(s, 1);
        for(auto &row : env)
            for(auto &e : row) e = b0.transpose() * e * b0.conjugate() + b1.transpose() * e * b1.conjugate();
    }
    DensityBlock out{Eigen::MatrixXcd(4, 4)};
    for(int a = 0; a < 2; ++a)
        for(int b = 0; b < 2; ++b)
            for(int ap = 0; ap < 2; ++ap)
                for(int bp = 0; bp < 2; ++bp)
                    out.rho(2 * a + b, 2 * ap + bp) =
                        (state.site_tensor(n - 1, b).transpose() * env[static_cast<std::size_t>(a)][static_cast<std::size_t>(ap)] * state.site_tensor(n - 1, bp).conjugate())(0, 0);
    return out;
}

/// Dense Fock amplitudes indexed by occupation bits with site 1 as the most significant bit.
inline std::vector<cplx> fock_coefficients(const TensorChain &state, std::size_t max_sites = 14) {
    const auto n = state.size();
    if(n > max_sites) throw BudgetError("fock_coefficients: 2^" + std::to_string(n) + " amplitudes exceed the budget (max " + std::to_string(max_sites) + " sites)");
    std::vector<cplx> out(std::size_t{1} << n);
    // Breadth-first over prefixes: prefix vectors of length bond_dimension(s).
    std::vector<Eigen::RowVectorXcd> layer{Eigen::RowVectorXcd::Ones(1)};
    for(std::size_t s = 0; s < n; ++s) {
        std::vector<Eigen::RowVectorXcd> next;
        next.reserve(layer.size() * 2);
        for(const auto &v : layer)
            for(int k = 0; k < 2; ++k) next.push_back(v * state.site_tensor(s, k));
        layer = std::move(next);
    }
    for(std::size_t i = 0; i < out.size(); ++i) out[i] = layer[i](0);
    return out;
}

/// <n_site> from the site density matrix.
inline double occupation(const TensorChain &state, std::size_t site) { return rdm_site(state, site).rho(1, 1).real(); }

} // namespace kitaev
