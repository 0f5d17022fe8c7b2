#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kscat/driver.hpp"
#include "kscat/errors.hpp"
#include "kscat/layer_ops.hpp"
#include "kscat/oracle.hpp"
#include "kscat/special.hpp"

using namespace kscat;

TEST_CASE("spectral parameter branch") {
    auto zi = SpectralParam::interior(Complex(4.0, 0.0));
    CHECK(zi.s() == Complex(2.0, 0.0));
    CHECK_THROWS_AS((void)SpectralParam::interior(Complex(-1.0, 0.0)), InvalidSpectralParam);
    CHECK_THROWS_AS((void)SpectralParam::boundary(1.0, LimitSide::plus), InvalidSpectralParam);
    auto zp = SpectralParam::boundary(-4.0, LimitSide::plus);
    CHECK(zp.s() == Complex(0.0, 2.0));
    CHECK(zp.k() == doctest::Approx(2.0));
    auto zm = zp.conj();
    CHECK(zm.side() == LimitSide::minus);
    CHECK(zm.s() == Complex(0.0, -2.0));
}

TEST_CASE("kernel spot values") {
    const Vec3 x(0, 0, 0);
    const Vec3 y1(1, 0, 0);
    auto z1 = SpectralParam::interior(Complex(1.0, 0.0));
    CHECK(std::abs(green_kernel(z1, x, y1) - std::exp(-1.0) / (4.0 * pi)) < 1e-15);
    // lambda = -1, (+) side, r = pi: e^{-i pi}/(4 pi^2) = -1/(4 pi^2)
    const Vec3 y2(pi, 0, 0);
    auto zb = SpectralParam::boundary(-1.0, LimitSide::plus);
    const Complex v = green_kernel(zb, x, y2);
    CHECK(std::abs(v - Complex(-1.0 / (4.0 * pi * pi), 0.0)) < 1e-15);
    // symmetry
    CHECK(green_kernel(zb, x, y2) == green_kernel(zb, y2, x));
    CHECK_THROWS_AS((void)green_kernel(z1, x, x), CoincidentPoints);
}

TEST_CASE("kernel gradients agree with finite differences") {
    const Complex s(0.8, 1.3);
    const Vec3 x(0.3, -0.2, 0.9), y(1.1, 0.4, -0.5), nu = Vec3(0.2, 0.9, -0.4).normalized();
    const double h = 1e-6;
    for (int d = 0; d < 3; ++d) {
        Vec3 e = Vec3::Zero();
        e[d] = h;
        const Complex fd = (green_kernel_s(s, x + e, y) - green_kernel_s(s, x - e, y)) / (2 * h);
        CHECK(std::abs(fd - green_kernel_grad(s, x, y)[d]) < 1e-8);
        const Complex fdl = (dl_kernel(s, x + e, y, nu) - dl_kernel(s, x - e, y, nu)) / (2 * h);
        CHECK(std::abs(fdl - dl_kernel_grad(s, x, y, nu)[d]) < 1e-7);
    }
    // dl kernel is d/dnu(y) of the kernel
    const Complex fd_nu =
        (green_kernel_s(s, x, y + h * nu) - green_kernel_s(s, x, y - h * nu)) / (2 * h);
    CHECK(std::abs(fd_nu - dl_kernel(s, x, y, nu)) < 1e-8);
}

TEST_CASE("single layer Galerkin: symmetry, realness, conjugation") {
    SurfaceMesh m = make_sphere(1.0, 1);
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    BoundaryOperator s = assemble_S(m, z);
    CHECK(s.matrix.imag().norm() == 0.0); // real kernel for real z
    CHECK((s.matrix - s.matrix.transpose()).norm() < 1e-14 * s.matrix.norm());

    auto zc = SpectralParam::interior(Complex(1.0, 0.7));
    BoundaryOperator sc = assemble_S(m, zc);
    BoundaryOperator scb = assemble_S(m, zc.conj());
    CHECK((scb.matrix - sc.matrix.conjugate()).norm() < 1e-14 * sc.matrix.norm());
}

TEST_CASE("single layer is positive definite at large real lambda") {
    SurfaceMesh m = make_sphere(1.0, 2);
    auto z = SpectralParam::interior(Complex(25.0, 0.0));
    BoundaryOperator s = assemble_S(m, z);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(0.5 * (s.matrix + s.matrix.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("single layer l=0 eigenvalue matches the sphere oracle to 1% at level 3") {
    SurfaceMesh m = make_sphere(1.0, 3);
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    BoundaryOperator s = assemble_S(m, z);
    const VectorC ones = VectorC::Ones(m.n_p0());
    const Complex rayleigh = (ones.transpose() * s.matrix * ones)(0) / Complex(m.total_area);
    const Complex exact = oracle::sphere_layer_eigenvalues(1.0, z, 0).S[0];
    CHECK(std::abs(rayleigh - exact) / std::abs(exact) < 0.01);
}

TEST_CASE("hypersingular Galerkin: symmetry and coercivity of -D") {
    SurfaceMesh m = make_sphere(1.0, 2);
    auto z = SpectralParam::interior(Complex(25.0, 0.0));
    BoundaryOperator d = assemble_D(m, z);
    CHECK((d.matrix - d.matrix.transpose()).norm() < 1e-12 * d.matrix.norm());
    Eigen::SelfAdjointEigenSolver<MatrixC> es(-0.5 * (d.matrix + d.matrix.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("hypersingular eigenvalues match the sphere oracle at level 3") {
    SurfaceMesh m = make_sphere(1.0, 3);
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    BoundaryOperator d = assemble_D(m, z);
    const MatrixR mass = p1_mass(m);
    const auto ev = oracle::sphere_layer_eigenvalues(1.0, z, 1);

    // l = 0: constant P1 function
    const VectorC ones = VectorC::Ones(m.n_p1());
    const Complex r0 = (ones.transpose() * d.matrix * ones)(0) /
                       (ones.transpose() * mass.cast<Complex>() * ones)(0);
    CHECK(std::abs(r0 - ev.D[0]) / std::abs(ev.D[0]) < 0.02);

    // l = 1: z-coordinate samples
    VectorC y10(m.n_p1());
    for (int i = 0; i < m.n_p1(); ++i) y10[i] = m.vertices[size_t(i)][2];
    const Complex r1 = (y10.transpose() * d.matrix * y10)(0) /
                       (y10.transpose() * mass.cast<Complex>() * y10)(0);
    CHECK(std::abs(r1 - ev.D[1]) / std::abs(ev.D[1]) < 0.02);
}

TEST_CASE("layer potentials: zero density, distance guard") {
    SurfaceMesh m = make_sphere(1.0, 1);
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    const VectorC zero = VectorC::Zero(m.n_p0());
    std::vector<Vec3> pts{Vec3(0, 0, 2.0), Vec3(0, 0, 0.2)};
    VectorC u = evaluate_layer(m, z, zero, LayerKind::SL, pts);
    CHECK(u.norm() == 0.0);
    std::vector<Vec3> close{Vec3(0, 0, 1.0 + 0.01 * m.mean_edge)};
    CHECK_THROWS_AS((void)evaluate_layer(m, z, zero, LayerKind::SL, close), PointTooClose);
}

TEST_CASE("jump relations at level 2 (in - ex, exterior normal)") {
    SurfaceMesh m = make_sphere(1.0, 2);
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    VolumeGrid empty;
    const JumpReport jr = jump_report(m, empty, z);
    CHECK(jr.sl_gamma1 < 0.06);  // [gamma1] SL = +1
    CHECK(jr.dl_gamma0 < 0.06);  // [gamma0] DL = -1
    CHECK(jr.dlv_gamma1 < 0.06); // [gamma1] DL = 0
}

TEST_CASE("far-field rows") {
    SurfaceMesh m = make_sphere(1.0, 3);
    const Vec3 e3(0, 0, 1);

    // k -> 0: SL pairing of the constant density tends to the area
    VectorC row0 = far_field_row(m, -1e-18, LimitSide::plus, e3, LayerKind::SL);
    CHECK(std::abs(row0.sum() - Complex(m.total_area)) < 1e-8 * m.total_area);

    // DL pairing of the constant: i k * surface integral of (xi.nu) e^{i k xi.y}
    //  = -4 pi k a^2 j_1(k a)
    const double lambda = -1.0, k = 1.0;
    VectorC row1 = far_field_row(m, lambda, LimitSide::plus, e3, LayerKind::DL);
    // flat facets limit the match to O(h^2) ~ 1% at level 3
    const Complex expect(-4.0 * pi * k * sph_j(1, k), 0.0);
    CHECK(std::abs(row1.sum() - expect) / std::abs(expect) < 0.01);

    // conjugation: row(-xi) = conj(row(xi))
    VectorC rp = far_field_row(m, lambda, LimitSide::plus, e3, LayerKind::SL);
    VectorC rm = far_field_row(m, lambda, LimitSide::plus, -e3, LayerKind::SL);
    CHECK((rm - rp.conjugate()).norm() < 1e-13 * rp.norm());
    VectorC rp1 = far_field_row(m, lambda, LimitSide::plus, e3, LayerKind::DL);
    VectorC rm1 = far_field_row(m, lambda, LimitSide::plus, -e3, LayerKind::DL);
    CHECK((rm1 - rp1.conjugate()).norm() < 1e-13 * rp1.norm());
}
