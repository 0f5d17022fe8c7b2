#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kscat/errors.hpp"
#include "kscat/operator_core.hpp"

using namespace kscat;

namespace {

KreinSystem rank_one(double b) {
    KreinSystem s;
    s.A = MatrixC::Zero(1, 1);
    s.tau1 = MatrixC::Ones(1, 1);
    s.tau2 = MatrixC::Zero(0, 1);
    s.B1 = b * MatrixC::Ones(1, 1);
    s.B0 = MatrixC::Zero(0, 0);
    s.B2 = MatrixC::Zero(0, 0);
    return s;
}

double rel_err(const MatrixC& a, const MatrixC& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

} // namespace

TEST_CASE("rank-one closed form: A_B = [b]") {
    const double b = 0.7;
    KreinSystem s = rank_one(b);
    const Complex z(1.3, 0.9);
    const MatrixC rb = krein_resolvent(s, z);
    CHECK(std::abs(rb(0, 0) - 1.0 / (z - b)) < 1e-12);
    const MatrixC ab = recovered_operator(s, z);
    CHECK(std::abs(ab(0, 0) - b) < 1e-12);

    // additive representation residual vanishes (needs an invertible B0 slot;
    // here m2 = 0, so the tau2 term is empty)
    const BoundaryResiduals br = rho_and_boundary_check(s, z);
    CHECK(br.additive_form < 1e-12);
    CHECK(br.green_identity < 1e-12);
}

TEST_CASE("zero coupling reduces to the free resolvent") {
    SystemSampler smp(11);
    KreinSystem s = smp.sample(6, 2, 2, true);
    s.B1.setZero();
    s.B0 = MatrixC::Identity(2, 2);
    s.B2.setZero();
    const Complex z(0.9, 0.4);
    const ResolventFamily f = free_resolvent(s, z);
    CHECK(rel_err(krein_resolvent(s, z), f.R) < 1e-12);
}

TEST_CASE("pseudo-resolvent identity on a random admissible system") {
    SystemSampler smp(2024);
    KreinSystem s = smp.sample(8, 3, 2, true);
    const Complex z(1.1, 0.7), w(-0.3, 1.4);
    const MatrixC rz = krein_resolvent(s, z);
    const MatrixC rw = krein_resolvent(s, w);
    CHECK(rel_err(rz - rw, (w - z) * rz * rw) < 1e-9);
    // adjoint symmetry
    CHECK(rel_err(krein_resolvent(s, std::conj(z)), rz.adjoint()) < 1e-10);
}

TEST_CASE("(PS1) and (PS2)") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SystemSampler smp(seed);
        KreinSystem s = smp.sample(10, 3, 3, true);
        const Complex z(1.7, 0.31), w(-0.4, 1.1);
        const MatrixC lz = lambda_direct(s, z);
        const MatrixC lw = lambda_direct(s, w);
        CHECK(rel_err(lambda_direct(s, std::conj(z)), lz.adjoint()) < 1e-10);

        const ResolventFamily fz = free_resolvent(s, z);
        const ResolventFamily fwb = free_resolvent(s, std::conj(w));
        const MatrixC rhs = (z - w) * lw * fwb.G.adjoint() * fz.G * lz;
        CHECK(rel_err(lw - lz, rhs) < 1e-9);
    }
}

TEST_CASE("recovered operator is Hermitian and z-independent") {
    SystemSampler smp(5);
    KreinSystem s = smp.sample(9, 2, 3, true);
    const MatrixC a1 = recovered_operator(s, Complex(1.0, 0.8));
    const MatrixC a2 = recovered_operator(s, Complex(-2.0, 0.5));
    const MatrixC a3 = recovered_operator(s, Complex(0.4, -1.2));
    CHECK(rel_err(a1, a1.adjoint()) < 1e-9);
    CHECK(rel_err(a2, a1) < 1e-8);
    CHECK(rel_err(a3, a1) < 1e-8);
}

TEST_CASE("schur blocks agree with direct inversion") {
    SystemSampler smp(7);
    KreinSystem s = smp.sample(10, 3, 3, true);
    const Complex z(0.8, 0.6);
    const MatrixC direct = lambda_direct(s, z);
    const LambdaBlocks bl = schur_blocks(s, z);
    CHECK((bl.Lambda - direct).norm() <= 1e-10 * direct.norm());
}

TEST_CASE("B1 = 0 reduction: Lambda^B1 = 0, Sigma = 1, LambdaHat = Lambda^B0B2") {
    SystemSampler smp(13);
    KreinSystem s = smp.sample_b0b2_only(8, 2, 3);
    const Complex z(1.2, 0.5);
    const LambdaBlocks bl = schur_blocks(s, z);
    CHECK(bl.LambdaB1.norm() == 0.0);
    CHECK(rel_err(bl.Sigma, MatrixC::Identity(3, 3)) < 1e-12);
    CHECK(rel_err(bl.LambdaHat, bl.LambdaB0B2) < 1e-12);
}

TEST_CASE("B2 = 0 reduction: alt resolvent equals the B1-only resolvent") {
    SystemSampler smp(17);
    KreinSystem s = smp.sample_b1_only(8, 3, 2);
    const Complex z(0.9, 1.1);
    const ResolventFamily f = free_resolvent(s, z);
    const ResolventFamily fb = free_resolvent(s, std::conj(z));
    const LambdaBlocks bl = schur_blocks(s, z);
    const MatrixC r_b1 = f.R + f.G1 * bl.LambdaB1 * fb.G1.adjoint();
    CHECK(rel_err(alt_resolvent(s, z), r_b1) < 1e-11);
    CHECK(bl.LambdaHat.norm() == 0.0);
}

TEST_CASE("alt resolvent equals krein resolvent on random systems") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        SystemSampler smp(seed);
        KreinSystem s = smp.sample(11, 3, 2, true);
        const Complex z(1.4, 0.9);
        CHECK(rel_err(alt_resolvent(s, z), krein_resolvent(s, z)) < 1e-10);
    }
}

TEST_CASE("v-shift: tau1 = 1, B1 = diag(v) reproduces the Schrodinger resolvent") {
    SystemSampler smp(31);
    const Eigen::Index n = 7;
    KreinSystem s = smp.sample(n, n, 2, true);
    s.tau1 = MatrixC::Identity(n, n);
    VectorR v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 0.3 * std::cos(double(i));
    s.B1 = v.cast<Complex>().asDiagonal();
    s.B2.setZero();
    s.B0 = MatrixC::Identity(2, 2);
    const Complex z(0.8, 1.3);
    const MatrixC direct =
        (-(s.A + MatrixC(v.cast<Complex>().asDiagonal())) + z * MatrixC::Identity(n, n))
            .inverse();
    CHECK(rel_err(alt_resolvent(s, z), direct) < 1e-10);
}

TEST_CASE("rho and boundary checks on random systems with invertible B0") {
    for (std::uint64_t seed : {41u, 42u}) {
        SystemSampler smp(seed);
        KreinSystem s = smp.sample(10, 3, 3, true);
        const BoundaryResiduals br = rho_and_boundary_check(s, Complex(1.3, 0.8));
        CHECK(br.green_identity < 1e-9);
        CHECK(br.boundary_condition < 1e-9);
        CHECK(br.additive_form < 1e-9);
    }
}

TEST_CASE("rank-deficient tau1 is handled through the range projector") {
    SystemSampler smp(55);
    KreinSystem s = smp.sample(8, 3, 2, true);
    s.tau1.row(1) = 2.0 * s.tau1.row(0); // rank 2 of 3
    s.tau1.row(2) = -0.5 * s.tau1.row(0);
    const MatrixC pi1 = range_projector(s.tau1);
    CHECK(std::abs(pi1.trace().real() - 1.0) < 1e-10); // rank detected: 1
    const BoundaryResiduals br = rho_and_boundary_check(s, Complex(1.1, 0.9));
    CHECK(br.green_identity < 1e-9);
    CHECK(br.boundary_condition < 1e-9);
}

TEST_CASE("error paths name the failing factor") {
    // z at an eigenvalue of A
    KreinSystem s = rank_one(0.7);
    CHECK_THROWS_AS((void)free_resolvent(s, Complex(0.0, 0.0)), SingularResolvent);
    KreinSystem d = rank_one(1.0);
    d.A(0, 0) = 2.0;
    CHECK_THROWS_AS((void)krein_resolvent(d, Complex(2.0, 0.0)), SingularResolvent);
    // M^B singular: rank-one with z = b
    KreinSystem m = rank_one(1.0);
    CHECK_THROWS_AS((void)krein_resolvent(m, Complex(1.0, 0.0)), SingularM);
    // Schur factor: B1-only with M^{B1} singular at the same point
    CHECK_THROWS_AS((void)schur_blocks(m, Complex(1.0, 0.0)), SingularM_B1);
}

TEST_CASE("admissibility validation") {
    SystemSampler smp(61);
    KreinSystem s = smp.sample(6, 2, 2, true);
    s.validate();
    KreinSystem bad = s;
    bad.B1(0, 1) += Complex(0.0, 0.5); // breaks Hermiticity
    CHECK_THROWS_AS(bad.validate(), InvalidSystem);
    KreinSystem bad2 = s;
    bad2.B0(0, 0) += Complex(0.3, 0.4); // breaks B0 B2^* = B2 B0^*
    CHECK_THROWS_AS(bad2.validate(), InvalidSystem);
}

TEST_CASE("free_resolvent rejects eigenvalues of A") {
    KreinSystem d = rank_one(1.0);
    d.A(0, 0) = 2.0;
    CHECK_THROWS_AS((void)free_resolvent(d, Complex(2.0, 0.0)), SingularResolvent);
}
