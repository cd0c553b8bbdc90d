#include <catch_amalgamated.hpp>

#include "free_fermion.hpp"
#include "test_helpers.hpp"

#include <kitaev/correlations.hpp>
#include <kitaev/eigenstate.hpp>
#include <kitaev/observables.hpp>
#include <kitaev/oracle.hpp>

#include <bit>
#include <numeric>

using namespace kitaev;
using Catch::Approx;

namespace {

struct Point {
    int      n;
    double   w, mu, d;
    Boundary b;
};

const std::vector<Point> points{
    {2, 0.4, 0.3, 1.0, Boundary::open},      {3, 1.0, 0.5, 1.0, Boundary::open},     {4, -0.6, 1.1, 0.8, Boundary::open},
    {5, 1.5, -2.5, 1.0, Boundary::open},     {6, 0.3, 3.0, 1.0, Boundary::open},     {8, 0.7, -0.2, 1.3, Boundary::open},
    {3, 0.8, 0.4, 1.0, Boundary::periodic},  {4, 1.0, 0.3, 1.0, Boundary::periodic}, {6, -0.9, 1.2, 1.0, Boundary::periodic},
    {7, 0.25, -3.0, 1.0, Boundary::periodic}, {8, 0.5, 2.5, 0.6, Boundary::periodic},
};

KitaevParams params_of(const Point &p) { return KitaevParams{p.n, p.w, p.mu, p.d, 0.0, p.b}; }

/// Norm of the projection of v onto the eigenspace of h at energy e.
double eigenspace_weight(const oracle::DenseOperator &h, const oracle::DenseVector &v, double e) {
    const auto es = oracle::diagonalize(h);
    double     w  = 0.0;
    for(Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if(std::abs(es.eigenvalues()(i) - e) < 1e-8) w += std::norm(es.eigenvectors().col(i).dot(v));
    return w;
}

} // namespace

TEST_CASE("reconstructed ground states agree with exact diagonalization") {
    for(const auto &pt : points) {
        CAPTURE(pt.n, pt.w, pt.mu, pt.d, to_string(pt.b));
        const auto p   = params_of(pt);
        const auto eig = solve_eigenstate(p);
        const auto h   = oracle::dense_hamiltonian(p);
        const auto gs  = oracle::ed_ground_state(h);
        const auto v   = testing::dense_vector(eig.state);
        CHECK(eig.energy == Approx(gs.energy).margin(1e-10));
        CHECK(testing::eigen_residual(h, v, eig.energy) < 1e-10);
        REQUIRE_FALSE(gs.degenerate);
        CHECK(testing::overlap(gs.vector, v) >= 1.0 - 1e-9);
        CHECK(eig.state.normalization_residual() < 1e-10);
        CHECK(eig.state.canonical_residual() < 1e-10);
    }
}

TEST_CASE("every occupation pattern is an eigenstate") {
    const KitaevParams p{4, 0.9, -0.7, 1.0, 0.0, Boundary::open};
    const auto         h = oracle::dense_hamiltonian(p);
    for(unsigned mask = 0; mask < 16; ++mask) {
        std::vector<std::uint8_t> bits(4);
        for(std::size_t k = 0; k < 4; ++k) bits[k] = static_cast<std::uint8_t>((mask >> k) & 1U);
        const auto eig = solve_eigenstate(p, OccupationPattern(bits));
        const auto v   = testing::dense_vector(eig.state);
        CHECK(testing::eigen_residual(h, v, eig.energy) < 1e-10);
        // Parity of the state equals the parity of its reference.
        const int expect = (std::popcount(mask) + (eig.plan.particle_hole ? 1 : 0)) % 2;
        REQUIRE(eig.state.parity().has_value());
        CHECK(*eig.state.parity() == expect);
        CHECK(testing::parity_sign(v) == (expect == 0 ? 1 : -1));
    }
}

TEST_CASE("degenerate points: the folded state lies in the ground eigenspace") {
    for(int n : {2, 4, 6}) {
        const KitaevParams p{n, 1.0, 0.0, 1.0, 0.0, Boundary::open};
        const auto         eig = solve_eigenstate(p);
        CHECK(eig.degenerate());
        const auto h = oracle::dense_hamiltonian(p);
        CHECK(eigenspace_weight(h, testing::dense_vector(eig.state), eig.energy) >= 1.0 - 1e-10);
        CHECK(eig.energy == Approx(-(n - 1.0)).margin(1e-12));
    }
}

TEST_CASE("energy from the tensor chain") {
    SECTION("open chains, ground and one quasiparticle") {
        const KitaevParams p{6, 1.0, 0.3, 1.0, 0.0, Boundary::open};
        const auto         g = solve_eigenstate(p);
        CHECK(energy_expectation(g.state, p) == Approx(-0.5 * std::accumulate(g.schur.epsilons.begin(), g.schur.epsilons.end(), 0.0)).margin(1e-8));
        const auto x = solve_eigenstate(p, OccupationPattern::excited(6, 0));
        CHECK(energy_expectation(x.state, p) == Approx(g.energy + g.schur.epsilons[0]).margin(1e-8));
    }
    SECTION("matches the dense expectation") {
        for(const auto &pt : points) {
            if(pt.b == Boundary::periodic) continue;
            const auto p   = params_of(pt);
            const auto eig = solve_eigenstate(p);
            const auto v   = testing::dense_vector(eig.state);
            CHECK(energy_expectation(eig.state, p) == Approx(oracle::ed_expectation(oracle::dense_hamiltonian(p), v).real()).margin(1e-10));
        }
    }
    SECTION("periodic shortcut") {
        const KitaevParams p{10, 0.5, -1.3, 1.0, 0.0, Boundary::periodic};
        const auto         eig = solve_eigenstate(p);
        REQUIRE_FALSE(eig.degenerate());
        CHECK(energy_expectation(eig.state, p) == Approx(eig.energy).margin(1e-8));
        CHECK_THROWS_AS(energy_expectation(eig.state, p, true), std::domain_error);
        CHECK_THROWS_AS(energy_expectation(eig.state, p.with_sites(9)), std::invalid_argument);
    }
}

TEST_CASE("bond Hamiltonians sum to the chain Hamiltonian") {
    // Two sites: the single bond with full on-site weight is the whole Hamiltonian.
    const KitaevParams p{2, 0.7, 0.4, 1.2, 0.0, Boundary::open};
    CHECK((bond_hamiltonian(p, 1.0, 1.0) - oracle::dense_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pipeline rejects what it cannot validate") {
    KitaevParams p{4, 1.0, 0.0, 1.0, 0.5, Boundary::open};
    CHECK_THROWS_AS(solve_eigenstate(p), std::invalid_argument);
    p.pairing_phase = 0.0;
    CHECK_THROWS_AS(solve_eigenstate(p, OccupationPattern::ground(3)), std::invalid_argument);
}

TEST_CASE("covariance oracle agrees with the tensor chain at N = 32") {
    // Independent check beyond the reach of exact diagonalization.
    for(double mu : {0.5, 1.5, 3.0}) {
        const KitaevParams p{32, 1.0, mu, 1.0, 0.0, Boundary::open};
        const auto         eig = solve_eigenstate(p);
        const auto         m   = testing::majorana_covariance(eig.schur, eig.occupation);
        CHECK(z_value(eig.state, parity(eig)) == Approx(std::abs(testing::end_hopping(m))).margin(1e-9));
        CHECK(mean_particle_number(eig.state) == Approx(testing::particle_number(m)).margin(1e-9));
    }
}
