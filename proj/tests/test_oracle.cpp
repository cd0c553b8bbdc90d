#include <catch_amalgamated.hpp>

#include <kitaev/errors.hpp>
#include <kitaev/oracle.hpp>

using namespace kitaev;
using namespace kitaev::oracle;
using Catch::Approx;

namespace {

double max_abs(const DenseOperator &m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("ladder operators obey canonical anticommutation") {
    const int n = 4;
    for(int i = 1; i <= n; ++i)
        for(int j = 1; j <= n; ++j) {
            const DenseOperator ci = annihilator(n, i), cj = annihilator(n, j);
            const DenseOperator id = DenseOperator::Identity(16, 16);
            CHECK(max_abs(ci * cj + cj * ci) == 0.0);
            CHECK(max_abs(ci * cj.adjoint() + cj.adjoint() * ci - (i == j ? id : DenseOperator::Zero(16, 16))) == 0.0);
        }
}

TEST_CASE("Majorana operators square to one and anticommute") {
    const int n = 3;
    for(double phi : {0.0, 1.1})
        for(int k = 1; k <= 2 * n; ++k)
            for(int l = 1; l <= 2 * n; ++l) {
                const DenseOperator gk = majorana(n, k, phi), gl = majorana(n, l, phi);
                CHECK(max_abs(gk - gk.adjoint()) < 1e-14);
                const DenseOperator expect = k == l ? DenseOperator(2.0 * DenseOperator::Identity(8, 8)) : DenseOperator::Zero(8, 8);
                CHECK(max_abs(gk * gl + gl * gk - expect) < 1e-14);
            }
}

TEST_CASE("basis ordering puts site 1 in the most significant bit") {
    const DenseOperator c1 = annihilator(3, 1);
    CHECK(c1(0b000, 0b100) == cplx(1.0));
    const DenseOperator c3 = annihilator(3, 3);
    CHECK(c3(0b100, 0b101) == cplx(-1.0)); // string over the occupied site 1
    CHECK(c3(0b000, 0b001) == cplx(1.0));
}

TEST_CASE("dense Hamiltonian is Hermitian and conserves parity") {
    for(auto b : {Boundary::open, Boundary::periodic}) {
        const KitaevParams  p{5, 0.7, -0.4, 1.1, 0.6, b};
        const DenseOperator h = dense_hamiltonian(p);
        CHECK(max_abs(h - h.adjoint()) < 1e-14);
        const DenseOperator pi = parity_operator(5);
        CHECK(max_abs(h * pi - pi * h) < 1e-14);
    }
}

TEST_CASE("single site: only the chemical potential term") {
    const DenseOperator h = dense_hamiltonian(KitaevParams{1, 1.0, 2.0, 1.0, 0.0, Boundary::open});
    CHECK(h(0, 0).real() == Approx(1.0));
    CHECK(h(1, 1).real() == Approx(-1.0));
}

TEST_CASE("two-site open chain matrix elements") {
    const DenseOperator h = dense_hamiltonian(KitaevParams{2, 0.5, 0.0, 0.25, 0.0, Boundary::open});
    // |01> <-> |10| hopping, |00> <-> |11> pairing (Delta c1 c2 |11> = -Delta |00>).
    CHECK(h(0b01, 0b10).real() == Approx(-0.5));
    CHECK(h(0b00, 0b11).real() == Approx(-0.25));
    CHECK(h(0b11, 0b00).real() == Approx(-0.25));
}

TEST_CASE("oracle enforces its size budget") {
    CHECK_THROWS_AS(dense_hamiltonian(KitaevParams{11, 1.0, 0.0, 1.0, 0.0, Boundary::open}), BudgetError);
    CHECK_THROWS_AS(annihilator(0, 1), BudgetError);
}

TEST_CASE("end hopping splits into the two edge Majorana bilinears") {
    // Q = i g_2 g_{2N-1} - i g_1 g_{2N}; the sum of the two is the end-to-end pairing term.
    for(int n : {2, 3, 4, 5}) {
        const DenseOperator q   = end_hopping_operator(n);
        const DenseOperator ql  = cplx(0, 1) * majorana(n, 2) * majorana(n, 2 * n - 1);
        const DenseOperator qr  = cplx(0, 1) * majorana(n, 1) * majorana(n, 2 * n);
        CHECK(max_abs(ql - qr - q) < 1e-14);
        const DenseOperator c1 = annihilator(n, 1), cn = annihilator(n, n);
        CHECK(max_abs(ql + qr - 2.0 * (c1 * cn - c1.adjoint() * cn.adjoint())) < 1e-14);
    }
}

TEST_CASE("ground state helpers") {
    const KitaevParams p{4, 1.0, 0.0, 1.0, 0.0, Boundary::open};
    const auto         gs = ed_ground_state(dense_hamiltonian(p));
    CHECK(gs.energy == Approx(-3.0)); // three bonds at energy -1, one zero mode
    CHECK(gs.degenerate);
    const auto gt = ed_ground_state(dense_hamiltonian(KitaevParams{4, 0.3, -1.0, 1.0, 0.0, Boundary::open}));
    CHECK_FALSE(gt.degenerate);
    CHECK(gt.vector.norm() == Approx(1.0));
    CHECK_THROWS_AS(ed_expectation(number_operator(3), gt.vector), std::invalid_argument);
    CHECK(ed_expectation(number_operator(4), DenseVector::Unit(16, 0b1011)).real() == Approx(3.0));
}

TEST_CASE("partial trace over the bulk") {
    // (|000> + |101>)/sqrt2: ends are maximally correlated, middle site empty.
    DenseVector v = DenseVector::Zero(8);
    v(0b000)      = v(0b101) = 1.0 / std::sqrt(2.0);
    const auto rho = ends_partial_trace(v, 3);
    CHECK(rho(0, 0).real() == Approx(0.5));
    CHECK(rho(3, 3).real() == Approx(0.5));
    CHECK(rho(0, 3).real() == Approx(0.5));
    CHECK(std::abs(rho(1, 1)) == 0.0);
    CHECK_THROWS_AS(ends_partial_trace(v, 4), std::invalid_argument);
}
