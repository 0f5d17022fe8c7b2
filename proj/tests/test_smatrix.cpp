#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kscat/errors.hpp"
#include "kscat/oracle.hpp"
#include "kscat/smatrix.hpp"

using namespace kscat;

namespace {

ScatteringMatrix assemble(const SurfaceMesh& mesh, const VolumeGrid& grid,
                          const InterfaceModel& model, double lambda, int n_polar,
                          DirectionSet* dirs_out = nullptr) {
    auto zp = SpectralParam::boundary(lambda, LimitSide::plus);
    ModelSystem msys(mesh, grid, model, zp);
    DirectionSet dirs = direction_quadrature(n_polar);
    if (dirs_out) *dirs_out = dirs;
    return smatrix_assemble(msys, dirs);
}

} // namespace

TEST_CASE("no perturbation: identity kernel") {
    SurfaceMesh mesh = make_sphere(1.0, 0);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::none(), -1.0, 4);
    CHECK(sm.kernel.norm() == 0.0);
    CHECK(sm.unitarity_defect() < 1e-14);
    auto sl = phase_shifts(sm, 3);
    for (const auto& s : sl) CHECK(std::abs(s - Complex(1.0)) < 1e-14);
    const AmplitudeTable at = cross_sections(sm);
    CHECK(at.sigma_integrated == 0.0);
}

TEST_CASE("pair apply block structure at v = 0") {
    SurfaceMesh mesh = make_sphere(1.0, 1);
    VolumeGrid empty;
    auto zp = SpectralParam::boundary(-1.0, LimitSide::plus);
    ModelSystem msys(mesh, empty, InterfaceModel::delta(1.0), zp);
    const Vec3 xi(0, 0, 1);
    PairOutput po = lambda_plus_pair_apply(msys, xi);
    CHECK(po.volume.size() == 0); // no grid: volume slot empty
    // boundary slot = LambdaHat applied to the plane-wave trace moments
    const VectorC m = far_field_row(mesh, -1.0, LimitSide::plus, xi, LayerKind::SL);
    CHECK((po.boundary - msys.lambda_hat_apply(m)).norm() < 1e-14 * po.boundary.norm());
}

TEST_CASE("weak potential: volume output is the first Born slot") {
    SurfaceMesh mesh = make_sphere(1.0, 0);
    const double depth = 1e-3;
    auto pot = PotentialSpec::gaussian(depth, 0.4, 1.0);
    VolumeGrid grid = make_volume_grid(pot, 0.25);
    auto zp = SpectralParam::boundary(-1.0, LimitSide::plus);
    ModelSystem msys(mesh, grid, InterfaceModel::none(), zp);
    PairOutput po = lambda_plus_pair_apply(msys, Vec3(0, 0, 1));
    VectorC vpw(grid.size());
    for (int c = 0; c < grid.size(); ++c)
        vpw[c] = grid.v[size_t(c)] * std::exp(iu * grid.centers[size_t(c)][2]);
    CHECK((po.volume - vpw).norm() < 50.0 * depth * depth); // O(depth^2) correction
}

TEST_CASE("hard sphere ka = 1 at level 2 matches the oracle loosely") {
    SurfaceMesh mesh = make_sphere(1.0, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.0, 6);
    CHECK(sm.unitarity_defect() < 0.1);
    CHECK(sm.reciprocity_defect() < 0.05);
    auto sl = phase_shifts(sm, 3);
    auto so = oracle::partial_wave_model(1.0, InterfaceModel::dirichlet(),
                                         PotentialSpec::none_potential(), -1.0, 3);
    for (int l = 0; l <= 3; ++l) {
        CHECK(std::abs(std::abs(sl[size_t(l)]) - 1.0) < 0.05);
        CHECK(std::abs(sl[size_t(l)] - so[size_t(l)]) < 0.08);
    }
    // hard-sphere s-wave: phase +2ka in this convention
    CHECK(std::abs(std::arg(sl[0]) - 2.0) < 0.08);
}

TEST_CASE("optical theorem consistency for the hard sphere (level 2)") {
    SurfaceMesh mesh = make_sphere(1.0, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.0, 6);
    const AmplitudeTable at = cross_sections(sm);
    CHECK(std::abs(at.sigma_integrated - at.sigma_optical) <
          0.08 * std::max(at.sigma_integrated, at.sigma_optical));
}

TEST_CASE("ellipsoid kernel is rejected as non-radial") {
    SurfaceMesh mesh = make_ellipsoid(1.0, 1.4, 0.7, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.0, 6);
    CHECK_THROWS_AS((void)phase_shifts(sm, 3), NotRadial);
}

TEST_CASE("energy continuity away from exceptional points") {
    SurfaceMesh mesh = make_sphere(1.0, 1);
    VolumeGrid empty;
    ScatteringMatrix s1 = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.0, 4);
    ScatteringMatrix s2 = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.02, 4);
    ScatteringMatrix s3 = assemble(mesh, empty, InterfaceModel::dirichlet(), -1.01, 4);
    const double d21 = (s2.kernel - s1.kernel).norm() / s1.kernel.norm();
    const double d31 = (s3.kernel - s1.kernel).norm() / s1.kernel.norm();
    CHECK(d21 < 0.05);          // continuous in lambda
    CHECK(d31 < 0.7 * d21);     // roughly linear in the increment
}

TEST_CASE("alpha -> 0 recovers the free kernel") {
    SurfaceMesh mesh = make_sphere(1.0, 1);
    VolumeGrid empty;
    ScatteringMatrix s0 = assemble(mesh, empty, InterfaceModel::delta(1.0), -1.0, 4);
    ScatteringMatrix s1 = assemble(mesh, empty, InterfaceModel::delta(1e-4), -1.0, 4);
    CHECK(s1.kernel.norm() < 2e-4 * s0.kernel.norm() / 1.0);
}

TEST_CASE("born limit: kernel entries match the first-order amplitude") {
    SurfaceMesh mesh = make_sphere(1.0, 0); // unused by the none model
    const double depth = 0.02;
    auto pot = PotentialSpec::gaussian(depth, 0.4, 1.2);
    VolumeGrid grid = make_volume_grid(pot, 0.16);
    auto zp = SpectralParam::boundary(-1.0, LimitSide::plus);
    ModelSystem msys(mesh, grid, InterfaceModel::none(), zp);
    const Vec3 in(0, 0, 1);
    for (double th : {0.5, 1.2, 2.2}) {
        const Vec3 out(std::sin(th), 0.0, std::cos(th));
        const Complex kk = smatrix_kernel_entry(msys, out, in);
        const Complex f_bem = -2.0 * pi * iu / 1.0 * kk;
        const Complex f_born = oracle::born_amplitude(pot, -1.0, th);
        CHECK(std::abs(f_bem - f_born) < 0.08 * std::abs(f_born));
    }
}

TEST_CASE("mu independence in the finite-dimensional sandbox") {
    SystemSampler smp(123);
    KreinSystem sys = smp.sample(10, 3, 3, true);
    const MuIndependenceReport rep = mu_independence_check(sys, 4, 30.0, 55.0);
    CHECK(rep.pairing_defect < 1e-6);
    CHECK(rep.smatrix_defect < 1e-6);
}

TEST_CASE("reciprocity defect is small for a real radial configuration") {
    SurfaceMesh mesh = make_sphere(1.0, 1);
    auto pot = PotentialSpec::gaussian(0.8, 0.4, 1.0);
    VolumeGrid grid = make_volume_grid(pot, 0.25);
    ScatteringMatrix sm = assemble(mesh, grid, InterfaceModel::delta(1.0), -1.0, 4);
    CHECK(sm.reciprocity_defect() < 0.02);
}

TEST_CASE("unitarity defect small for every interface model") {
    SurfaceMesh mesh = make_sphere(1.0, 2);
    VolumeGrid empty;
    for (const auto& model : {InterfaceModel::delta(1.0), InterfaceModel::dirichlet(),
                              InterfaceModel::neumann(), InterfaceModel::delta_prime(0.7)}) {
        ScatteringMatrix sm = assemble(mesh, empty, model, -1.0, 4);
        CHECK(sm.unitarity_defect() < 0.05);
    }
}

TEST_CASE("every interface model with a potential matches the radial oracle (level 2)") {
    SurfaceMesh mesh = make_sphere(1.0, 2);
    auto pot = PotentialSpec::gaussian(0.8, 0.5, 1.4);
    VolumeGrid grid = make_volume_grid(pot, 0.22);
    for (const auto& model :
         {InterfaceModel::dirichlet(), InterfaceModel::neumann(), InterfaceModel::delta(1.0),
          InterfaceModel::delta_prime(0.9)}) {
        ScatteringMatrix sm = assemble(mesh, grid, model, -1.0, 5);
        auto sl = phase_shifts(sm, 2);
        auto so = oracle::partial_wave_model(1.0, model, pot, -1.0, 2);
        for (int l = 0; l <= 2; ++l)
            CHECK(std::abs(sl[size_t(l)] - so[size_t(l)]) < 0.08);
        CHECK(sm.unitarity_defect() < 0.05);
    }
}

TEST_CASE("second energy: hard sphere at ka = 2 (level 2)") {
    SurfaceMesh mesh = make_sphere(1.0, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -4.0, 6);
    auto sl = phase_shifts(sm, 3);
    auto so = oracle::partial_wave_model(1.0, InterfaceModel::dirichlet(),
                                         PotentialSpec::none_potential(), -4.0, 3);
    for (int l = 0; l <= 3; ++l)
        CHECK(std::abs(sl[size_t(l)] - so[size_t(l)]) < 0.1);
}

TEST_CASE("hard-sphere cross section trends to the geometric-optics limit") {
    // sigma_tot falls monotonically from 4 pi a^2 (ka -> 0) toward 2 pi a^2;
    // at ka = 1 the textbook value is ~3.3 pi a^2
    auto sigma_oracle = [](double ka) {
        auto sl = oracle::partial_wave_model(1.0, InterfaceModel::dirichlet(),
                                             PotentialSpec::none_potential(), -ka * ka, 14);
        double s = 0.0;
        for (int l = 0; l <= 14; ++l)
            s += (2.0 * l + 1.0) * std::norm(1.0 - sl[size_t(l)]);
        return pi / (ka * ka) * s;
    };
    const double s1 = sigma_oracle(1.0), s2 = sigma_oracle(2.0), s4 = sigma_oracle(4.0);
    CHECK(s1 > s2);
    CHECK(s2 > s4);
    CHECK(s4 > 2.0 * pi);              // stays above the geometric limit
    CHECK(std::abs(s4 - 2.0 * pi) < std::abs(s1 - 2.0 * pi)); // approaching it
    CHECK(s1 == doctest::Approx(3.37 * pi).epsilon(0.02));

    // BEM agrees with the oracle value at ka = 1 and ka = 2
    SurfaceMesh mesh = make_sphere(1.0, 2);
    VolumeGrid empty;
    for (double ka : {1.0, 2.0}) {
        ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -ka * ka, 6);
        const double sb = cross_sections(sm).sigma_integrated;
        CHECK(sb == doctest::Approx(sigma_oracle(ka)).epsilon(0.05));
    }
}

TEST_CASE("non-radial configuration still yields a near-unitary kernel") {
    SurfaceMesh mesh = make_ellipsoid(1.0, 1.3, 0.8, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::delta(1.0), -1.0, 5);
    CHECK(sm.unitarity_defect() < 0.05);
    CHECK(sm.reciprocity_defect() < 0.05);
}

TEST_CASE("radius-2 sphere at lambda = -0.25 (scaling weld)") {
    SurfaceMesh mesh = make_sphere(2.0, 2);
    VolumeGrid empty;
    ScatteringMatrix sm = assemble(mesh, empty, InterfaceModel::dirichlet(), -0.25, 5);
    auto sl = phase_shifts(sm, 2);
    auto so = oracle::partial_wave_model(2.0, InterfaceModel::dirichlet(),
                                         PotentialSpec::none_potential(), -0.25, 2);
    for (int l = 0; l <= 2; ++l)
        CHECK(std::abs(sl[size_t(l)] - so[size_t(l)]) < 0.06);
}

TEST_CASE("off-center potential: kernel not radial, still near-unitary") {
    SurfaceMesh mesh = make_sphere(1.0, 0); // unused by the none model
    auto pot = PotentialSpec::gaussian(1.0, 0.35, 1.0, Vec3(0.4, 0.0, 0.0));
    VolumeGrid grid = make_volume_grid(pot, 0.2);
    auto zp = SpectralParam::boundary(-1.0, LimitSide::plus);
    ModelSystem msys(mesh, grid, InterfaceModel::none(), zp);
    ScatteringMatrix sm = smatrix_assemble(msys, direction_quadrature(5));
    CHECK(sm.unitarity_defect() < 0.02);
    CHECK(sm.reciprocity_defect() < 0.02);
    CHECK_THROWS_AS((void)phase_shifts(sm, 3), NotRadial);
}
