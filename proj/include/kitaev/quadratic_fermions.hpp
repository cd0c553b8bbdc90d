#pragma once

// Majorana coupling matrix of the chain, its canonical block decomposition
// and the single-body / many-body energies that follow from it.

#include "errors.hpp"
#include "params.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kitaev {

/// Real antisymmetric 2N x 2N matrix A with H = (i/4) sum_kl A_kl g_k g_l.
/// Row/column 2j-2 and 2j-1 (0-based) hold the two Majorana operators of site j.
class CouplingMatrix {
  public:
    static CouplingMatrix from_matrix(Eigen::MatrixXd a, double tol = 1e-12) {
        if(a.rows() != a.cols() || a.rows() == 0 || a.rows() % 2 != 0)
            throw std::invalid_argument("CouplingMatrix: expected a non-empty square matrix of even dimension");
        if(double r = (a + a.transpose()).cwiseAbs().maxCoeff(); r > tol * std::max(1.0, a.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("CouplingMatrix: matrix is not antisymmetric (residual " + std::to_string(r) + ")");
        CouplingMatrix m;
        m.a_ = std::move(a);
        return m;
    }

    [[nodiscard]] const Eigen::MatrixXd &matrix() const { return a_; }
    [[nodiscard]] int                    dim() const { return static_cast<int>(a_.rows()); }
    [[nodiscard]] int                    n_sites() const { return dim() / 2; }
    [[nodiscard]] double                 operator()(int k, int l) const { return a_(k, l); }

  private:
    Eigen::MatrixXd a_;
};

/// Build A from the Majorana form of the Hamiltonian:
///   H = (i/2) sum_j ( -mu g_{2j-1} g_{2j} + (|D| - w) g_{2j-1} g_{2j+2} + (|D| + w) g_{2j} g_{2j+1} ).
/// The pairing phase only enters the Majorana definitions, so A does not depend on it.
inline CouplingMatrix build_coupling_matrix(const KitaevParams &p) {
    p.validate();
    const int       n   = p.n_sites;
    const int       dim = 2 * n;
    Eigen::MatrixXd a   = Eigen::MatrixXd::Zero(dim, dim);
    auto            add = [&](int k, int l, double v) {
        a(k, l) += v;
        a(l, k) -= v;
    };
    const double d = p.pairing_magnitude;
    for(int j = 0; j < n; ++j) {
        add(2 * j, 2 * j + 1, -p.chemical_potential);
        if(j == n - 1 && p.boundary == Boundary::open) continue;
        add(2 * j, (2 * j + 3) % dim, d - p.hopping);
        add(2 * j + 1, (2 * j + 2) % dim, d + p.hopping);
    }
    return CouplingMatrix::from_matrix(std::move(a));
}

/// Orthogonal W and single-body energies with W A W^T = diag([[0, e_k], [-e_k, 0]]).
/// Energies are non-negative, sorted non-increasing, so zero modes sit at the end.
struct MajoranaSchur {
    Eigen::MatrixXd     w_matrix;
    std::vector<double> epsilons;
    double              zero_mode_threshold = 0.0;

    [[nodiscard]] int n_sites() const { return static_cast<int>(epsilons.size()); }

    /// True when the smallest single-body energy counts as a zero mode. Reporting only.
    [[nodiscard]] bool degenerate() const { return !epsilons.empty() && epsilons.back() < zero_mode_threshold; }

    [[nodiscard]] double ground_energy() const { return -0.5 * std::accumulate(epsilons.begin(), epsilons.end(), 0.0); }

    [[nodiscard]] double orthogonality_residual() const {
        const auto n = w_matrix.rows();
        return (w_matrix * w_matrix.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    }

    [[nodiscard]] Eigen::MatrixXd canonical_form() const {
        const int       n = n_sites();
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for(int k = 0; k < n; ++k) {
            t(2 * k, 2 * k + 1) = epsilons[k];
            t(2 * k + 1, 2 * k) = -epsilons[k];
        }
        return t;
    }
};

namespace detail {

/// Householder reduction Q^T A Q = T with T tridiagonal. Antisymmetry of A carries over to T.
inline void tridiagonalize(Eigen::MatrixXd &a, Eigen::MatrixXd &q) {
    const Eigen::Index dim = a.rows();
    q.setIdentity(dim, dim);
    Eigen::VectorXd work(dim);
    for(Eigen::Index k = 0; k + 2 < dim; ++k) {
        const Eigen::Index len = dim - k - 1;
        Eigen::VectorXd    essential(len - 1);
        double             tau = 0.0, beta = 0.0;
        a.col(k).tail(len).makeHouseholder(essential, tau, beta);
        a.bottomRightCorner(len, dim - k).applyHouseholderOnTheLeft(essential, tau, work.data());
        a.bottomRightCorner(dim, len).applyHouseholderOnTheRight(essential, tau, work.data());
        q.rightCols(len).applyHouseholderOnTheRight(essential, tau, work.data());
    }
}

/// Columns of x + i y span an eigenspace of A at i*e (e > 0), so any unitary
/// recombination is an equally valid Schur basis. Replace it by the reduced
/// row-echelon basis, orthonormalized from the last vector back, so that
/// degenerate modes stay local instead of spreading over the chain.
inline void localize_cluster(Eigen::Ref<Eigen::MatrixXd> x, Eigen::Ref<Eigen::MatrixXd> y) {
    using cplx             = std::complex<double>;
    const Eigen::Index m   = x.cols();
    const Eigen::Index dim = x.rows();
    Eigen::MatrixXcd   r   = (x.cast<cplx>() + cplx(0, 1) * y.cast<cplx>()).transpose();
    const double       tol = 1e-9 * r.cwiseAbs().maxCoeff();
    Eigen::Index       rank = 0;
    for(Eigen::Index c = 0; c < dim && rank < m; ++c) {
        Eigen::Index piv;
        const double best = r.col(c).tail(m - rank).cwiseAbs().maxCoeff(&piv);
        if(best < tol) continue;
        r.row(rank).swap(r.row(rank + piv));
        r.row(rank) /= r(rank, c);
        for(Eigen::Index i = 0; i < m; ++i)
            if(i != rank) r.row(i) -= r(i, c) * r.row(rank);
        ++rank;
    }
    if(rank != m) throw NumericalError("schur_decompose: degenerate cluster lost rank while localizing");
    for(Eigen::Index k = m - 1; k >= 0; --k) {
        for(Eigen::Index l = k + 1; l < m; ++l) r.row(k) -= r.row(l).dot(r.row(k)) * r.row(l);
        r.row(k).normalize();
    }
    r *= std::sqrt(2.0);
    x = r.real().transpose();
    y = r.imag().transpose();
}

} // namespace detail

/// Canonical form of an antisymmetric matrix. A is reduced to tridiagonal form,
/// whose even/odd index split is an N x N lower-bidiagonal block B; the SVD of B
/// gives the pairs (x_k, y_k) with x_k^T A y_k = e_k >= 0. Singular vectors stay
/// orthonormal for degenerate and zero energies alike.
inline MajoranaSchur schur_decompose(const CouplingMatrix &coupling) {
    const int       dim = coupling.dim();
    const int       n   = dim / 2;
    Eigen::MatrixXd t   = coupling.matrix();
    Eigen::MatrixXd q;
    detail::tridiagonalize(t, q);

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for(int i = 0; i < n; ++i) {
        b(i, i) = t(2 * i, 2 * i + 1);
        if(i + 1 < n) b(i + 1, i) = t(2 * i + 2, 2 * i + 1);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if(svd.info() != Eigen::Success) throw NumericalError("schur_decompose: SVD of the bidiagonal block failed");

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, n), y = Eigen::MatrixXd::Zero(dim, n);
    for(int i = 0; i < n; ++i) {
        x.row(2 * i)     = svd.matrixU().row(i);
        y.row(2 * i + 1) = svd.matrixV().row(i);
    }
    x = q * x;
    y = q * y;

    const auto  &sv      = svd.singularValues();
    const double tie_tol = 1e-11 * std::max(1.0, n > 0 ? sv(0) : 0.0);
    for(int first = 0; first < n;) {
        int last = first + 1;
        while(last < n && sv(first) - sv(last) <= tie_tol) ++last;
        if(last - first > 1 && sv(last - 1) > tie_tol) detail::localize_cluster(x.middleCols(first, last - first), y.middleCols(first, last - first));
        first = last;
    }

    MajoranaSchur out;
    out.w_matrix.resize(dim, dim);
    out.epsilons.resize(static_cast<std::size_t>(n));
    for(int k = 0; k < n; ++k) {
        out.w_matrix.row(2 * k)     = x.col(k).transpose();
        out.w_matrix.row(2 * k + 1) = y.col(k).transpose();
        out.epsilons[static_cast<std::size_t>(k)] = svd.singularValues()(k);
    }
    const double scale      = out.epsilons.empty() ? 0.0 : out.epsilons.front();
    out.zero_mode_threshold = 1e-12 * std::max(1.0, scale);
    return out;
}

/// Closed-form single-body energies of the periodic chain, flattened as
/// (E_1^+, E_1^-, E_2^+, E_2^-, ...) for 1 <= k < N/2, followed by the
/// unpaired momenta: 2w - mu and -2w - mu for even N, only -2w - mu for odd N.
/// The magnitudes, sorted, are the Schur energies of the same chain.
inline std::vector<double> analytic_periodic_energies(const KitaevParams &p) {
    p.validate();
    if(p.boundary != Boundary::periodic) throw std::invalid_argument("analytic_periodic_energies: requires a periodic chain");
    const int           n = p.n_sites;
    const double        w = p.hopping, mu = p.chemical_potential, d = p.pairing_magnitude;
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(n));
    for(int k = 1; 2 * k < n; ++k) {
        const double q   = 2.0 * std::numbers::pi * k / n;
        const double xi  = 2.0 * w * std::cos(q) + mu;
        const double gap = 2.0 * d * std::sin(q);
        const double ek  = std::sqrt(xi * xi + gap * gap);
        e.push_back(ek);
        e.push_back(-ek);
    }
    if(n % 2 == 0) e.push_back(2.0 * w - mu);
    e.push_back(-2.0 * w - mu);
    return e;
}

/// Magnitudes of analytic_periodic_energies sorted non-increasing.
inline std::vector<double> analytic_periodic_epsilons(const KitaevParams &p) {
    auto e = analytic_periodic_energies(p);
    for(auto &x : e) x = std::abs(x);
    std::sort(e.begin(), e.end(), std::greater<>());
    return e;
}

/// Occupation numbers n_k in {0, 1} of the diagonal modes.
class OccupationPattern {
  public:
    OccupationPattern() = default;
    explicit OccupationPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for(auto b : bits_)
            if(b > 1) throw std::invalid_argument("OccupationPattern: entries must be 0 or 1");
    }
    static OccupationPattern ground(int n) { return OccupationPattern(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)); }
    /// Ground pattern with one quasiparticle in `mode` (0-based).
    static OccupationPattern excited(int n, int mode) {
        auto bits = std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0);
        bits.at(static_cast<std::size_t>(mode)) = 1;
        return OccupationPattern(std::move(bits));
    }

    [[nodiscard]] std::size_t                    size() const { return bits_.size(); }
    [[nodiscard]] std::uint8_t                   operator[](std::size_t k) const { return bits_[k]; }
    [[nodiscard]] std::span<const std::uint8_t>  bits() const { return bits_; }
    [[nodiscard]] int                            count() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

  private:
    std::vector<std::uint8_t> bits_;
};

/// E = sum_k e_k (n_k - 1/2).
inline double eigenenergy(std::span<const double> epsilons, const OccupationPattern &occupation) {
    if(epsilons.size() != occupation.size())
        throw std::invalid_argument("eigenenergy: " + std::to_string(epsilons.size()) + " energies but " + std::to_string(occupation.size()) +
                                    " occupations");
    double e = 0.0;
    for(std::size_t k = 0; k < epsilons.size(); ++k) e += epsilons[k] * (occupation[k] - 0.5);
    return e;
}

/// Every many-body level sum_k e_k (n_k - 1/2), ascending. 2^N entries.
inline std::vector<double> many_body_spectrum(std::span<const double> epsilons) {
    const std::size_t n = epsilons.size();
    if(n > 24) throw BudgetError("many_body_spectrum: 2^N levels too many for N = " + std::to_string(n));
    std::vector<double> levels(std::size_t{1} << n);
    for(std::size_t mask = 0; mask < levels.size(); ++mask) {
        double e = 0.0;
        for(std::size_t k = 0; k < n; ++k) e += epsilons[k] * (((mask >> k) & 1U) != 0U ? 0.5 : -0.5);
        levels[mask] = e;
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

} // namespace kitaev
