#pragma once

// Tensor chain in mixed canonical form with a movable orthogonality center.
//
// Sites left of the center hold left isometries, sites right of it right
// isometries. A two-site gate first moves the center onto the pair, so the
// SVD that splits it is an exact Schmidt decomposition and both new tensors
// are isometries whatever is truncated. Eigenstate reconstruction runs on this
// form; to_tensor_chain() converts to the lambda/B form used for measurements.
//
// Bond labels are the fermion parity of everything left of the bond. Only
// parity-preserving and parity-flipping gates are accepted.

#include "tensor_chain.hpp"

#include <Eigen/QR>

namespace kitaev {

namespace detail {

using SectorIndex = std::array<std::vector<Eigen::Index>, 2>;

/// Indices of a bond, grouped by label.
inline SectorIndex plain_sectors(const std::vector<std::uint8_t> &labels) {
    SectorIndex out;
    for(std::size_t x = 0; x < labels.size(); ++x) out[labels[x]].push_back(static_cast<Eigen::Index>(x));
    return out;
}

/// Indices k * d + x of a bond stacked with a site index k, grouped by label(x) ^ k.
inline SectorIndex stacked_sectors(const std::vector<std::uint8_t> &labels) {
    SectorIndex  out;
    const auto   d = static_cast<Eigen::Index>(labels.size());
    for(int k = 0; k < 2; ++k)
        for(Eigen::Index x = 0; x < d; ++x) out[labels[static_cast<std::size_t>(x)] ^ k].push_back(k * d + x);
    return out;
}

struct ThinQr {
    Eigen::MatrixXcd q;
    Eigen::MatrixXcd r;
};

inline ThinQr thin_qr(const Eigen::MatrixXcd &m) {
    const Eigen::Index                       k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    ThinQr                                   out;
    out.q = qr.householderQ() * Eigen::MatrixXcd::Identity(m.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

/// Sector-wise SVD of a parity block-diagonal matrix, truncated and renormalized.
/// Columns of u and rows of vh are embedded in the full index spaces.
struct SectorSvd {
    Eigen::MatrixXcd          u;
    Eigen::VectorXd           s;
    Eigen::MatrixXcd          vh;
    std::vector<std::uint8_t> labels;
    double                    discarded = 0.0;
};

inline SectorSvd truncated_sector_svd(const Eigen::MatrixXcd &m, const SectorIndex &rows, const SectorIndex &cols, double threshold,
                                      std::size_t max_bond, const std::string &where) {
    struct Triple {
        double       sigma;
        std::uint8_t sector;
        Eigen::Index index;
    };
    std::array<ThinSvd, 2> parts;
    std::vector<Triple>    triples;
    double                 total = 0.0;
    for(std::uint8_t s = 0; s < 2; ++s) {
        if(rows[s].empty() || cols[s].empty()) continue;
        parts[s] = thin_svd(m(rows[s], cols[s]));
        for(Eigen::Index i = 0; i < parts[s].s.size(); ++i) {
            total += parts[s].s(i) * parts[s].s(i);
            if(parts[s].s(i) > 0.0) triples.push_back({parts[s].s(i), s, i});
        }
    }
    std::stable_sort(triples.begin(), triples.end(), [](const Triple &a, const Triple &b) {
        if(std::abs(a.sigma - b.sigma) > 1e-14) return a.sigma > b.sigma;
        return a.sector < b.sector;
    });
    if(triples.empty() || triples.front().sigma < 1e-150) throw NumericalError(where + ": all singular values vanished");

    const double cutoff = threshold * triples.front().sigma;
    std::size_t  keep   = 0;
    double       kept   = 0.0;
    while(keep < triples.size() && triples[keep].sigma > cutoff) {
        kept += triples[keep].sigma * triples[keep].sigma;
        ++keep;
    }
    if(keep > max_bond) throw BondOverflowError(where + " needs dimension " + std::to_string(keep) + " > cap " + std::to_string(max_bond));

    const double norm = std::sqrt(kept);
    const auto   chi  = static_cast<Eigen::Index>(keep);
    SectorSvd    out;
    out.u         = Eigen::MatrixXcd::Zero(m.rows(), chi);
    out.vh        = Eigen::MatrixXcd::Zero(chi, m.cols());
    out.s.resize(chi);
    out.labels.resize(keep);
    out.discarded = (total - kept) / total;
    for(Eigen::Index j = 0; j < chi; ++j) {
        const auto &t  = triples[static_cast<std::size_t>(j)];
        const auto &p  = parts[t.sector];
        const auto &ri = rows[t.sector];
        const auto &ci = cols[t.sector];
        for(std::size_t a = 0; a < ri.size(); ++a) out.u(ri[a], j) = p.u(static_cast<Eigen::Index>(a), t.index);
        for(std::size_t c = 0; c < ci.size(); ++c) out.vh(j, ci[c]) = std::conj(p.v(static_cast<Eigen::Index>(c), t.index));
        out.s(j)                                  = t.sigma / norm;
        out.labels[static_cast<std::size_t>(j)] = t.sector;
    }
    return out;
}

} // namespace detail

class MixedCanonicalChain {
  public:
    static MixedCanonicalChain product_state(std::span<const std::uint8_t> occupations, TruncationPolicy policy = {}) {
        if(occupations.empty()) throw std::invalid_argument("MixedCanonicalChain: at least one site required");
        MixedCanonicalChain mc;
        mc.policy_ = policy;
        const auto n = occupations.size();
        mc.t_.resize(n);
        mc.labels_.assign(n + 1, std::vector<std::uint8_t>{0});
        std::uint8_t prefix = 0;
        for(std::size_t s = 0; s < n; ++s) {
            if(occupations[s] > 1) throw std::invalid_argument("MixedCanonicalChain: occupations must be 0 or 1");
            mc.t_[s][0]                 = Eigen::MatrixXcd::Zero(1, 1);
            mc.t_[s][1]                 = Eigen::MatrixXcd::Zero(1, 1);
            mc.t_[s][occupations[s]](0, 0) = 1.0;
            prefix ^= occupations[s];
            mc.labels_[s + 1][0] = prefix;
        }
        return mc;
    }

    [[nodiscard]] std::size_t size() const { return t_.size(); }
    [[nodiscard]] std::size_t center() const { return center_; }
    [[nodiscard]] double      discarded_weight() const { return discarded_; }
    [[nodiscard]] std::size_t max_bond_dimension() const {
        std::size_t m = 1;
        for(const auto &l : labels_) m = std::max(m, l.size());
        return m;
    }
    [[nodiscard]] int parity() const { return labels_.back().front(); }

    /// Site tensor in the current gauge (left isometry, center, or right isometry).
    [[nodiscard]] const Eigen::MatrixXcd &site_tensor(std::size_t site, int k) const { return t_.at(site).at(static_cast<std::size_t>(k)); }

    void apply_single_site_gate(std::size_t site, const Eigen::Matrix2cd &u) {
        if(site >= size()) throw std::out_of_range("MixedCanonicalChain: site " + std::to_string(site) + " out of range");
        if(double r = detail::unitarity_residual(u); r > 1e-10)
            throw std::invalid_argument("apply_single_site_gate: gate is not unitary (residual " + std::to_string(r) + ")");
        track_parity(u, 1, site + 1);
        auto                  &t  = t_[site];
        const Eigen::MatrixXcd t0 = t[0], t1 = t[1];
        t[0]                      = u(0, 0) * t0 + u(0, 1) * t1;
        t[1]                      = u(1, 0) * t0 + u(1, 1) * t1;
    }

    /// Move the center onto the pair, contract with u and split by a truncated SVD.
    /// The center ends on the side away from where it came from.
    void apply_two_site_gate(std::size_t left, const Eigen::Matrix4cd &u) {
        if(left + 1 >= size()) throw std::out_of_range("apply_two_site_gate: left site " + std::to_string(left) + " has no right neighbour");
        if(double r = detail::unitarity_residual(u); r > 1e-10)
            throw std::invalid_argument("apply_two_site_gate: gate is not unitary (residual " + std::to_string(r) + ")");
        track_parity(u, 2, left + 2);
        const bool        from_left = center_ <= left;
        const std::size_t r         = left + 1;
        move_center(from_left ? left : r);

        const Eigen::Index dl = t_[left][0].rows(), dm = t_[left][0].cols(), dr = t_[r][0].cols();
        Eigen::MatrixXcd   bl(2 * dl, dm), br(dm, 2 * dr);
        bl << t_[left][0], t_[left][1];
        br << t_[r][0], t_[r][1];
        const Eigen::MatrixXcd prod  = bl * br;
        Eigen::MatrixXcd       theta = Eigen::MatrixXcd::Zero(2 * dl, 2 * dr);
        for(int jk_out = 0; jk_out < 4; ++jk_out) {
            auto blk = theta.block((jk_out >> 1) * dl, (jk_out & 1) * dr, dl, dr);
            for(int jk_in = 0; jk_in < 4; ++jk_in)
                if(u(jk_out, jk_in) != cplx(0.0)) blk += u(jk_out, jk_in) * prod.block((jk_in >> 1) * dl, (jk_in & 1) * dr, dl, dr);
        }

        auto svd = detail::truncated_sector_svd(theta, detail::stacked_sectors(labels_[left]), detail::stacked_sectors(labels_[r + 1]),
                                                policy_.relative_threshold, policy_.max_bond,
                                                "apply_two_site_gate: bond " + std::to_string(r));
        discarded_ += svd.discarded;
        if(from_left) {
            svd.vh  = svd.s.asDiagonal() * svd.vh;
            center_ = r;
        } else {
            svd.u   = svd.u * svd.s.asDiagonal();
            center_ = left;
        }
        for(int k = 0; k < 2; ++k) {
            t_[left][static_cast<std::size_t>(k)] = svd.u.middleRows(k * dl, dl);
            t_[r][static_cast<std::size_t>(k)]    = svd.vh.middleCols(k * dr, dr);
        }
        labels_[r] = std::move(svd.labels);
    }

    void move_center(std::size_t site) {
        if(site >= size()) throw std::out_of_range("move_center: site out of range");
        while(center_ < site) shift_right();
        while(center_ > site) shift_left();
    }

    /// Right-canonical lambda/B form. Sweeps the center to the right end, then
    /// splits site by site from the right; every bond is truncated as in a gate.
    [[nodiscard]] TensorChain to_tensor_chain() const {
        MixedCanonicalChain w = *this;
        const auto          n = size();
        w.move_center(n - 1);
        std::vector<Eigen::VectorXd> lambda(n + 1, Eigen::VectorXd::Ones(1));
        for(std::size_t s = n - 1; s > 0; --s) {
            const Eigen::Index dl = w.t_[s][0].rows(), dr = w.t_[s][0].cols();
            Eigen::MatrixXcd   y(dl, 2 * dr);
            y << w.t_[s][0], w.t_[s][1];
            auto svd = detail::truncated_sector_svd(y, detail::plain_sectors(w.labels_[s]), detail::stacked_sectors(w.labels_[s + 1]),
                                                    policy_.relative_threshold, policy_.max_bond, "to_tensor_chain: bond " + std::to_string(s));
            w.discarded_ += svd.discarded;
            for(int k = 0; k < 2; ++k) w.t_[s][static_cast<std::size_t>(k)] = svd.vh.middleCols(k * dr, dr);
            const Eigen::MatrixXcd l = svd.u * svd.s.asDiagonal();
            for(auto &t : w.t_[s - 1]) t = t * l;
            lambda[s]   = std::move(svd.s);
            w.labels_[s] = std::move(svd.labels);
        }
        const double norm = std::sqrt(w.t_[0][0].squaredNorm() + w.t_[0][1].squaredNorm());
        for(auto &t : w.t_[0]) t /= norm;
        return TensorChain::from_right_canonical(std::move(w.t_), std::move(lambda), std::move(w.labels_), policy_, w.discarded_);
    }

  private:
    void track_parity(const Eigen::MatrixXcd &u, int local_sites, std::size_t first_bond_after) {
        switch(detail::classify_gate(u, local_sites)) {
            case detail::GateParity::preserving: break;
            case detail::GateParity::flipping:
                for(std::size_t b = first_bond_after; b < labels_.size(); ++b)
                    for(auto &x : labels_[b]) x ^= 1U;
                break;
            case detail::GateParity::mixed: throw std::invalid_argument("MixedCanonicalChain: gate mixes parity sectors");
        }
    }

    /// QR of the center [T^0; T^1]: Q stays as a left isometry, R moves right.
    void shift_right() {
        const std::size_t  c  = center_;
        const Eigen::Index dl = t_[c][0].rows(), dr = t_[c][0].cols();
        Eigen::MatrixXcd   x(2 * dl, dr);
        x << t_[c][0], t_[c][1];
        const auto                 rows = detail::stacked_sectors(labels_[c]);
        const auto                 cols = detail::plain_sectors(labels_[c + 1]);
        std::array<detail::ThinQr, 2> parts;
        Eigen::Index               chi = 0;
        for(int s = 0; s < 2; ++s)
            if(!rows[s].empty() && !cols[s].empty()) {
                parts[s] = detail::thin_qr(x(rows[s], cols[s]));
                chi += parts[s].q.cols();
            }
        Eigen::MatrixXcd          q = Eigen::MatrixXcd::Zero(2 * dl, chi), r = Eigen::MatrixXcd::Zero(chi, dr);
        std::vector<std::uint8_t> labels;
        for(std::uint8_t s = 0; s < 2; ++s) {
            const auto k = parts[s].q.cols();
            if(k == 0) continue;
            const auto j0 = static_cast<Eigen::Index>(labels.size());
            for(std::size_t a = 0; a < rows[s].size(); ++a) q.row(rows[s][a]).segment(j0, k) = parts[s].q.row(static_cast<Eigen::Index>(a));
            for(std::size_t b = 0; b < cols[s].size(); ++b) r.col(cols[s][b]).segment(j0, k) = parts[s].r.col(static_cast<Eigen::Index>(b));
            labels.insert(labels.end(), static_cast<std::size_t>(k), s);
        }
        for(int k = 0; k < 2; ++k) {
            t_[c][static_cast<std::size_t>(k)] = q.middleRows(k * dl, dl);
            t_[c + 1][static_cast<std::size_t>(k)] = r * t_[c + 1][static_cast<std::size_t>(k)];
        }
        labels_[c + 1] = std::move(labels);
        center_        = c + 1;
    }

    /// LQ of the center [T^0, T^1]: Q stays as a right isometry, L moves left.
    void shift_left() {
        const std::size_t  c  = center_;
        const Eigen::Index dl = t_[c][0].rows(), dr = t_[c][0].cols();
        Eigen::MatrixXcd   y(dl, 2 * dr);
        y << t_[c][0], t_[c][1];
        const auto                 rows = detail::plain_sectors(labels_[c]);
        const auto                 cols = detail::stacked_sectors(labels_[c + 1]);
        std::array<detail::ThinQr, 2> parts;
        Eigen::Index               chi = 0;
        for(int s = 0; s < 2; ++s)
            if(!rows[s].empty() && !cols[s].empty()) {
                parts[s] = detail::thin_qr(y(rows[s], cols[s]).adjoint());
                chi += parts[s].q.cols();
            }
        Eigen::MatrixXcd          l = Eigen::MatrixXcd::Zero(dl, chi), q = Eigen::MatrixXcd::Zero(chi, 2 * dr);
        std::vector<std::uint8_t> labels;
        for(std::uint8_t s = 0; s < 2; ++s) {
            const auto k = parts[s].q.cols();
            if(k == 0) continue;
            const auto j0 = static_cast<Eigen::Index>(labels.size());
            for(std::size_t a = 0; a < rows[s].size(); ++a) l.row(rows[s][a]).segment(j0, k) = parts[s].r.col(static_cast<Eigen::Index>(a)).adjoint();
            for(std::size_t b = 0; b < cols[s].size(); ++b) q.col(cols[s][b]).segment(j0, k) = parts[s].q.row(static_cast<Eigen::Index>(b)).adjoint();
            labels.insert(labels.end(), static_cast<std::size_t>(k), s);
        }
        for(int k = 0; k < 2; ++k) {
            t_[c][static_cast<std::size_t>(k)]     = q.middleCols(k * dr, dr);
            t_[c - 1][static_cast<std::size_t>(k)] = t_[c - 1][static_cast<std::size_t>(k)] * l;
        }
        labels_[c] = std::move(labels);
        center_    = c - 1;
    }

    std::vector<std::array<Eigen::MatrixXcd, 2>> t_;
    std::vector<std::vector<std::uint8_t>>       labels_;
    std::size_t                                  center_    = 0;
    double                                       discarded_ = 0.0;
    TruncationPolicy                             policy_;
};

} // namespace kitaev
