#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kscat/oracle.hpp"
#include "kscat/special.hpp"

using namespace kscat;
using namespace kscat::oracle;

TEST_CASE("single-layer eigenvalues validated by 1D radial quadrature") {
    for (int l : {0, 1, 2, 3}) {
        CHECK(sphere_single_layer_quadrature_defect(1.0, SpectralParam::interior(Complex(1.0, 0.0)), l) < 1e-12);
        CHECK(sphere_single_layer_quadrature_defect(0.7, SpectralParam::interior(Complex(2.0, 0.3)), l) < 1e-12);
        CHECK(sphere_single_layer_quadrature_defect(1.0, SpectralParam::boundary(-1.0, LimitSide::plus), l) < 1e-12);
    }
}

TEST_CASE("Laplace limit: S_l -> a/(2l+1)") {
    auto z = SpectralParam::interior(Complex(1e-10, 0.0));
    const double a = 1.3;
    auto ev = sphere_layer_eigenvalues(a, z, 2);
    for (int l = 0; l <= 2; ++l)
        CHECK(std::abs(ev.S[size_t(l)] - Complex(a / (2.0 * l + 1.0))) < 1e-4 * a);
}

TEST_CASE("eigenvalues at zbar are conjugates") {
    auto z = SpectralParam::interior(Complex(1.4, 0.8));
    auto e1 = sphere_layer_eigenvalues(1.0, z, 3);
    auto e2 = sphere_layer_eigenvalues(1.0, z.conj(), 3);
    for (int l = 0; l <= 3; ++l) {
        CHECK(std::abs(e2.S[size_t(l)] - std::conj(e1.S[size_t(l)])) < 1e-13);
        CHECK(std::abs(e2.D[size_t(l)] - std::conj(e1.D[size_t(l)])) < 1e-12 * std::abs(e1.D[size_t(l)]));
    }
}

TEST_CASE("hard sphere: S_0 = e^{2 i k a} in the library convention") {
    const double ka = 1.0;
    auto sl = partial_wave_model(1.0, InterfaceModel::dirichlet(),
                                 PotentialSpec::none_potential(), -ka * ka, 3);
    CHECK(std::abs(std::abs(sl[0]) - 1.0) < 1e-8);
    CHECK(std::abs(std::arg(sl[0]) - 2.0 * ka) < 1e-7); // |delta_0| = ka, sign +
    // closed form -h1/h2
    const Complex h1(sph_j(0, ka), sph_y(0, ka));
    const Complex h2 = std::conj(h1);
    CHECK(std::abs(sl[0] - (-h1 / h2)) < 1e-7);
}

TEST_CASE("ODE oracle equals the closed form assembled from layer eigenvalues") {
    const double lambda = -1.0;
    const auto vnone = PotentialSpec::none_potential();
    for (const auto& model :
         {InterfaceModel::dirichlet(), InterfaceModel::neumann(), InterfaceModel::delta(1.0),
          InterfaceModel::delta(-0.6), InterfaceModel::delta_prime(0.8)}) {
        auto ode = partial_wave_model(1.0, model, vnone, lambda, 4);
        auto cf = interface_smatrix_closed_form(1.0, model, lambda, 4);
        for (int l = 0; l <= 4; ++l)
            CHECK(std::abs(ode[size_t(l)] - cf[size_t(l)]) < 1e-8);
    }
}

TEST_CASE("alpha = 0 delta model does not scatter") {
    auto sl = partial_wave_model(1.0, InterfaceModel::delta(0.0),
                                 PotentialSpec::none_potential(), -1.0, 3);
    for (const auto& s : sl) CHECK(std::abs(s - Complex(1.0)) < 1e-8);
}

TEST_CASE("neumann and delta-prime(0) coincide") {
    auto sn = partial_wave_model(1.0, InterfaceModel::neumann(),
                                 PotentialSpec::none_potential(), -1.0, 4);
    auto sd = partial_wave_model(1.0, InterfaceModel::delta_prime(0.0),
                                 PotentialSpec::none_potential(), -1.0, 4);
    for (int l = 0; l <= 4; ++l) CHECK(std::abs(sn[size_t(l)] - sd[size_t(l)]) < 1e-10);
}

TEST_CASE("per-l unitarity for all models with a potential") {
    const auto v = PotentialSpec::gaussian(0.8, 0.4, 1.2);
    for (const auto& model :
         {InterfaceModel::none(), InterfaceModel::delta(1.0), InterfaceModel::dirichlet(),
          InterfaceModel::neumann(), InterfaceModel::delta_prime(0.7)}) {
        auto sl = partial_wave_model(1.0, model, v, -1.0, 5);
        for (const auto& s : sl) CHECK(std::abs(std::abs(s) - 1.0) < 1e-8);
    }
}

TEST_CASE("l-decay: |S_l - 1| falls off rapidly past ka") {
    auto sl = partial_wave_model(1.0, InterfaceModel::dirichlet(),
                                 PotentialSpec::none_potential(), -1.0, 8);
    for (int l = 3; l < 8; ++l) {
        const double cur = std::abs(sl[size_t(l)] - Complex(1.0));
        const double nxt = std::abs(sl[size_t(l + 1)] - Complex(1.0));
        CHECK(nxt < cur);
    }
    CHECK(std::abs(sl[8] - Complex(1.0)) < 1e-6);
}

TEST_CASE("born amplitude") {
    CHECK(born_amplitude(PotentialSpec::none_potential(), -1.0, 0.5) == Complex(0.0));
    const double depth = 0.3, sigma = 0.5;
    const auto v = PotentialSpec::gaussian(depth, sigma, 3.0 * sigma);
    // forward value proportional to the integral of v
    const double integral = depth * std::pow(pi, 1.5) * sigma * sigma * sigma;
    const Complex f0 = born_amplitude(v, -1.0, 0.0);
    CHECK(std::abs(f0 - Complex(-integral / (4.0 * pi))) < 2e-4 * integral);
    // gaussian stays gaussian in momentum transfer
    const double k = 1.0, th = 1.2;
    const double q = 2.0 * k * std::sin(0.5 * th);
    const Complex fq = born_amplitude(v, -k * k, th);
    CHECK(std::abs(fq / f0 - std::exp(-q * q * sigma * sigma / 4.0)) < 1e-3);
}
