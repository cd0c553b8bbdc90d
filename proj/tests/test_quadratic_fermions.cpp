#include <catch_amalgamated.hpp>

#include <kitaev/oracle.hpp>
#include <kitaev/quadratic_fermions.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace kitaev;
using kitaev::oracle::cplx;
using Catch::Approx;

namespace {

KitaevParams chain(int n, double w, double mu, double d = 1.0, Boundary b = Boundary::open) { return KitaevParams{n, w, mu, d, 0.0, b}; }

} // namespace

TEST_CASE("coupling matrix entries for a two-site open chain") {
    const auto a = build_coupling_matrix(chain(2, 0.5, 0.3));
    REQUIRE(a.dim() == 4);
    CHECK(a(0, 1) == Approx(-0.3));
    CHECK(a(2, 3) == Approx(-0.3));
    CHECK(a(0, 3) == Approx(0.5));  // |D| - w
    CHECK(a(1, 2) == Approx(1.5));  // |D| + w
    CHECK(a(0, 2) == 0.0);
    CHECK(a(1, 3) == 0.0);
    CHECK((a.matrix() + a.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic coupling wraps to the first site") {
    const auto a = build_coupling_matrix(chain(3, 0.4, 0.0, 1.0, Boundary::periodic));
    CHECK(a(4, 1) == Approx(0.6));
    CHECK(a(5, 0) == Approx(1.4));
    const auto open = build_coupling_matrix(chain(3, 0.4, 0.0));
    CHECK(open(4, 1) == 0.0);
    CHECK(open(5, 0) == 0.0);
}

TEST_CASE("coupling matrix does not depend on the pairing phase") {
    auto p          = chain(4, 0.7, -0.2);
    const auto a0   = build_coupling_matrix(p);
    p.pairing_phase = 1.3;
    CHECK((build_coupling_matrix(p).matrix() - a0.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupling matrix rejects bad input") {
    CHECK_THROWS_AS(build_coupling_matrix(chain(1, 1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(build_coupling_matrix(chain(4, 1.0, 0.0, -1.0)), std::invalid_argument);
    CHECK_THROWS_AS(build_coupling_matrix(chain(4, std::nan(""), 0.0)), std::invalid_argument);
    Eigen::MatrixXd sym = Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(CouplingMatrix::from_matrix(sym), std::invalid_argument);
    CHECK_THROWS_AS(CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
    auto bad          = chain(4, 1.0, 0.0);
    bad.pairing_phase = 2.0 * std::numbers::pi;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Majorana form reproduces the Fock-space Hamiltonian") {
    // H = (i/4) sum_kl A_kl g_k g_l, assembled from dense Majorana matrices.
    for(auto b : {Boundary::open, Boundary::periodic}) {
        for(double phi : {0.0, 0.9}) {
            auto p          = chain(4, 0.8, -0.6, 1.3, b);
            p.pairing_phase = phi;
            const auto            a = build_coupling_matrix(p);
            oracle::DenseOperator h = oracle::DenseOperator::Zero(16, 16);
            for(int k = 1; k <= 8; ++k)
                for(int l = 1; l <= 8; ++l)
                    if(a(k - 1, l - 1) != 0.0) h += cplx(0, 0.25 * a(k - 1, l - 1)) * oracle::majorana(4, k, phi) * oracle::majorana(4, l, phi);
            CHECK((h - oracle::dense_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("Schur form: orthogonal W, sorted non-negative energies") {
    std::mt19937                           rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for(int trial = 0; trial < 20; ++trial) {
        const int  n = 2 + trial % 9;
        const auto p = chain(n, u(rng), u(rng), std::abs(u(rng)), trial % 2 ? Boundary::periodic : Boundary::open);
        const auto a = build_coupling_matrix(p);
        const auto s = schur_decompose(a);
        CHECK(s.orthogonality_residual() < 1e-10);
        CHECK((s.w_matrix * a.matrix() * s.w_matrix.transpose() - s.canonical_form()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::is_sorted(s.epsilons.rbegin(), s.epsilons.rend()));
        CHECK(s.epsilons.back() >= 0.0);
    }
}

TEST_CASE("Schur form of exactly degenerate couplings") {
    SECTION("all couplings zero") {
        const auto s = schur_decompose(build_coupling_matrix(chain(3, 0.0, 0.0, 0.0)));
        CHECK(s.orthogonality_residual() < 1e-14);
        for(double e : s.epsilons) CHECK(e == 0.0);
        CHECK(s.degenerate());
    }
    SECTION("w = |D|, mu = 0 leaves one zero mode") {
        const auto s = schur_decompose(build_coupling_matrix(chain(6, 1.0, 0.0)));
        CHECK(s.orthogonality_residual() < 1e-12);
        for(int k = 0; k < 5; ++k) CHECK(s.epsilons[static_cast<std::size_t>(k)] == Approx(2.0).margin(1e-12));
        CHECK(s.epsilons.back() < 1e-12);
        CHECK(s.degenerate());
    }
    SECTION("diagonal chain") {
        const auto s = schur_decompose(build_coupling_matrix(chain(4, 0.0, 1.5, 0.0)));
        for(double e : s.epsilons) CHECK(e == Approx(1.5).margin(1e-13));
        CHECK_FALSE(s.degenerate());
        CHECK(s.ground_energy() == Approx(-3.0));
    }
    SECTION("w = 0 splits into two identical Majorana chains") {
        const auto a = build_coupling_matrix(chain(12, 0.0, 0.5));
        const auto s = schur_decompose(a);
        CHECK(s.orthogonality_residual() < 1e-12);
        CHECK((s.w_matrix * a.matrix() * s.w_matrix.transpose() - s.canonical_form()).cwiseAbs().maxCoeff() < 1e-12);
        for(std::size_t k = 0; k < 12; k += 2) CHECK(s.epsilons[k] == Approx(s.epsilons[k + 1]).margin(1e-12));
    }
    SECTION("periodic chain with repeated momenta") {
        const auto s = schur_decompose(build_coupling_matrix(chain(12, 0.3, 0.1, 1.0, Boundary::periodic)));
        CHECK(s.orthogonality_residual() < 1e-12);
    }
}

TEST_CASE("open two-site ground energy") {
    // Even sector {|00>, |11>}: -mu + mu (diag), off-diagonal D. Odd sector: +-w.
    const auto s = schur_decompose(build_coupling_matrix(chain(2, 1.0, 0.0)));
    CHECK(s.ground_energy() == Approx(-1.0).margin(1e-12));
    const auto t = schur_decompose(build_coupling_matrix(chain(2, 0.0, 2.0, 0.0)));
    CHECK(t.ground_energy() == Approx(-2.0).margin(1e-12));
}

TEST_CASE("many-body spectrum matches exact diagonalization") {
    for(auto b : {Boundary::open, Boundary::periodic}) {
        for(int n : {2, 3, 5, 8}) {
            const auto p   = chain(n, 0.65, -0.9, 1.2, b);
            const auto s   = schur_decompose(build_coupling_matrix(p));
            const auto mb  = many_body_spectrum(s.epsilons);
            const auto ed  = oracle::ed_spectrum(oracle::dense_hamiltonian(p));
            REQUIRE(mb.size() == ed.size());
            double err = 0.0;
            for(std::size_t i = 0; i < mb.size(); ++i) err = std::max(err, std::abs(mb[i] - ed[i]));
            CHECK(err < 1e-9);
        }
    }
}

TEST_CASE("eigenenergy of occupation patterns") {
    const std::vector<double> eps{3.0, 1.0, 0.5};
    CHECK(eigenenergy(eps, OccupationPattern::ground(3)) == Approx(-2.25));
    CHECK(eigenenergy(eps, OccupationPattern::excited(3, 2)) == Approx(-1.75));
    CHECK(eigenenergy(eps, OccupationPattern({1, 1, 1})) == Approx(2.25));
    CHECK_THROWS_AS(eigenenergy(eps, OccupationPattern::ground(2)), std::invalid_argument);
    CHECK_THROWS_AS(OccupationPattern({0, 2}), std::invalid_argument);
    CHECK_THROWS(OccupationPattern::excited(3, 3));
}

TEST_CASE("periodic closed-form energies") {
    SECTION("values for N = 4") {
        const auto p = chain(4, 1.0, 0.5, 1.0, Boundary::periodic);
        const auto e = analytic_periodic_energies(p);
        REQUIRE(e.size() == 4);
        const double q = 2.0 * std::numbers::pi / 4.0;
        const double r = std::sqrt(std::pow(2.0 * std::cos(q) + 0.5, 2) + 4.0 * std::pow(std::sin(q), 2));
        CHECK(e[0] == Approx(r));
        CHECK(e[1] == Approx(-r));
        CHECK(e[2] == Approx(2.0 - 0.5));
        CHECK(e[3] == Approx(-2.0 - 0.5));
    }
    SECTION("odd N has a single unpaired momentum") {
        const auto e = analytic_periodic_energies(chain(5, 1.0, 0.5, 1.0, Boundary::periodic));
        CHECK(e.size() == 5);
        CHECK(e.back() == Approx(-2.5));
    }
    SECTION("magnitudes equal the Schur energies") {
        for(int n : {3, 4, 7, 10}) {
            for(double mu : {-3.0, -1.0, 0.25, 2.0}) {
                const auto p  = chain(n, -0.75, mu, 1.0, Boundary::periodic);
                const auto ea = analytic_periodic_epsilons(p);
                const auto es = schur_decompose(build_coupling_matrix(p)).epsilons;
                REQUIRE(ea.size() == es.size());
                for(std::size_t k = 0; k < ea.size(); ++k) CHECK(ea[k] == Approx(es[k]).margin(1e-10));
            }
        }
    }
    SECTION("open boundary is refused") { CHECK_THROWS_AS(analytic_periodic_energies(chain(4, 1.0, 0.0)), std::invalid_argument); }
}
