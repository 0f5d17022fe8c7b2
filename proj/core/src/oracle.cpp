#include "kscat/oracle.hpp"

#include <cmath>

#include "kscat/errors.hpp"
#include "kscat/special.hpp"

namespace kscat {
namespace oracle {

SphereLayerEigenvalues sphere_layer_eigenvalues(double a, const SpectralParam& z,
                                                int ell_max) {
    if (a <= 0.0) throw Error("sphere radius must be positive");
    const Complex s = z.s();
    const Complex x = s * a;
    SphereLayerEigenvalues out;
    out.S.resize(size_t(ell_max) + 1);
    out.D.resize(size_t(ell_max) + 1);
    for (int l = 0; l <= ell_max; ++l) {
        const Complex il = mod_sph_i(l, x), kl = mod_sph_k(l, x);
        const Complex ilp = mod_sph_i_deriv(l, x), klp = mod_sph_k_deriv(l, x);
        out.S[size_t(l)] = (2.0 * s / pi) * a * a * il * kl;
        out.D[size_t(l)] = (2.0 * s * s * s / pi) * a * a * ilp * klp;
    }
    return out;
}

double sphere_single_layer_quadrature_defect(double a, const SpectralParam& z, int ell) {
    // Funk-Hecke projection of the kernel with the chord substitution
    // r = |x - y|:  S_l = (1/2) int_0^{2a} e^{-s r} P_l(1 - r^2/(2 a^2)) dr.
    const Complex s = z.s();
    std::vector<double> gx, gw;
    gauss_legendre(96, gx, gw);
    Complex acc = 0.0;
    for (size_t i = 0; i < gx.size(); ++i) {
        const double r = a * (gx[i] + 1.0); // maps [-1,1] -> [0, 2a]
        const double w = a * gw[i];
        acc += w * std::exp(-s * r) * legendre_p(ell, 1.0 - r * r / (2.0 * a * a));
    }
    acc *= 0.5;
    const Complex closed = sphere_layer_eigenvalues(a, z, ell).S[size_t(ell)];
    return std::abs(acc - closed) / std::abs(closed);
}

namespace {

struct RadialState {
    double w, wp;
};

// One RK4 step of w'' = q(r) w with q(r) = l(l+1)/r^2 - lam_phys - v(r).
template <class Q>
RadialState rk4_step(const RadialState& y, double r, double h, const Q& q) {
    auto f = [&](double rr, const RadialState& s) {
        return RadialState{s.wp, q(rr) * s.w};
    };
    const RadialState k1 = f(r, y);
    const RadialState k2 = f(r + 0.5 * h, {y.w + 0.5 * h * k1.w, y.wp + 0.5 * h * k1.wp});
    const RadialState k3 = f(r + 0.5 * h, {y.w + 0.5 * h * k2.w, y.wp + 0.5 * h * k2.wp});
    const RadialState k4 = f(r + h, {y.w + h * k3.w, y.wp + h * k3.wp});
    return {y.w + h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w),
            y.wp + h / 6.0 * (k1.wp + 2 * k2.wp + 2 * k3.wp + k4.wp)};
}

template <class Q>
RadialState integrate(RadialState y, double r0, double r1, double h_target, const Q& q) {
    const int n = std::max(1, int(std::ceil((r1 - r0) / h_target)));
    const double h = (r1 - r0) / n;
    double r = r0;
    for (int i = 0; i < n; ++i) {
        y = rk4_step(y, r, h, q);
        r += h;
        const double m = std::max(std::abs(y.w), std::abs(y.wp));
        if (!std::isfinite(m)) throw StiffIntegration("radial integration overflow");
        if (m > 1e250) {
            y.w /= m;
            y.wp /= m;
        }
    }
    return y;
}

} // namespace

std::vector<Complex> partial_wave_model(double a, const InterfaceModel& model,
                                        const PotentialSpec& v, double lambda,
                                        int ell_max) {
    if (!(lambda < 0.0)) throw Error("partial_wave_model requires lambda < 0");
    if (!model.vertex_strength.empty())
        throw Error("partial_wave_model needs a constant interface strength");
    if (!v.empty() && v.center.norm() > 1e-12 * std::max(1.0, a))
        throw Error("partial_wave_model needs a centered radial potential");
    const double k = std::sqrt(-lambda);
    const double lam_phys = -lambda;
    const double rv = v.empty() ? 0.0 : v.support_radius;
    const double h_r = std::min(1.0 / (40.0 * k), (rv > 0.0 ? rv : a) / 400.0);
    const double r_match = std::max({3.0 * a, 3.0 * rv, 10.0 / k});

    std::vector<Complex> out(size_t(ell_max) + 1);
    const bool exterior_only = (model.variant == InterfaceModel::Variant::dirichlet ||
                                model.variant == InterfaceModel::Variant::neumann ||
                                (model.variant == InterfaceModel::Variant::delta_prime &&
                                 model.strength == 0.0));

    for (int l = 0; l <= ell_max; ++l) {
        auto q = [&](double r) {
            return double(l) * (l + 1.0) / (r * r) - lam_phys - v.radial_value(r);
        };
        RadialState y{};
        if (exterior_only) {
            if (model.variant == InterfaceModel::Variant::dirichlet) {
                y = {0.0, 1.0}; // R(a) = 0
            } else {
                y = {a, 1.0};   // R'(a) = 0
            }
            y = integrate(y, a, r_match, h_r, q);
        } else {
            const double r0 = 1e-4 * std::min(a, 1.0 / k);
            // w ~ r^{l+1} near the origin (normalization is irrelevant)
            y = {1.0, (l + 1.0) / r0};
            y = integrate(y, r0, a, h_r, q);
            if (model.variant == InterfaceModel::Variant::delta) {
                // w'(a+) = w'(a-) - alpha w(a)   ([gamma1]u = alpha gamma0 u)
                y.wp -= model.strength * y.w;
            } else if (model.variant == InterfaceModel::Variant::delta_prime) {
                // gamma1 u = -theta [gamma0]u with gamma1 continuous
                const double R_in = y.w / a;
                const double Rp = (y.wp * a - y.w) / (a * a);
                const double R_ex = R_in + Rp / model.strength;
                y = {a * R_ex, R_ex + a * Rp};
            }
            y = integrate(y, a, r_match, h_r, q);
        }
        // match R = A j_l(kr) + B y_l(kr)
        const double r = r_match;
        const double R = y.w / r;
        const double Rp = (y.wp * r - y.w) / (r * r);
        const double jl = sph_j(l, k * r), yl = sph_y(l, k * r);
        const double jlp = k * sph_j_deriv(l, k * r), ylp = k * sph_y_deriv(l, k * r);
        const double det = jl * ylp - jlp * yl; // = 1/(k r^2)
        const double A = (R * ylp - Rp * yl) / det;
        const double B = (Rp * jl - R * jlp) / det;
        // outgoing branch e^{-ikr} pairs with h^(2):  R ~ h^(1) + S_l h^(2)
        out[size_t(l)] = Complex(A, B) / Complex(A, -B);
    }
    return out;
}

std::vector<Complex> interface_smatrix_closed_form(double a, const InterfaceModel& model,
                                                   double lambda, int ell_max) {
    if (!(lambda < 0.0)) throw Error("interface_smatrix_closed_form requires lambda < 0");
    const double k = std::sqrt(-lambda);
    const SpectralParam zp = SpectralParam::boundary(lambda, LimitSide::plus);
    const SphereLayerEigenvalues ev = sphere_layer_eigenvalues(a, zp, ell_max);
    std::vector<Complex> out(size_t(ell_max) + 1, Complex(1.0, 0.0));
    for (int l = 0; l <= ell_max; ++l) {
        Complex lam_hat;
        double tl;
        switch (model.variant) {
            case InterfaceModel::Variant::none:
                continue;
            case InterfaceModel::Variant::delta:
                lam_hat = model.strength / (1.0 - model.strength * ev.S[size_t(l)]);
                tl = sph_j(l, k * a);
                break;
            case InterfaceModel::Variant::dirichlet:
                lam_hat = -1.0 / ev.S[size_t(l)];
                tl = sph_j(l, k * a);
                break;
            case InterfaceModel::Variant::neumann:
                lam_hat = -1.0 / ev.D[size_t(l)];
                tl = k * sph_j_deriv(l, k * a);
                break;
            case InterfaceModel::Variant::delta_prime:
                lam_hat = 1.0 / (model.strength - ev.D[size_t(l)]);
                tl = k * sph_j_deriv(l, k * a);
                break;
            default:
                continue;
        }
        out[size_t(l)] = 1.0 - 2.0 * iu * k * a * a * tl * tl * lam_hat;
    }
    return out;
}

double radial_fourier_transform(const PotentialSpec& v, double q) {
    if (v.empty()) return 0.0;
    std::vector<double> gx, gw;
    gauss_legendre(200, gx, gw);
    const double R = v.support_radius;
    double acc = 0.0;
    for (size_t i = 0; i < gx.size(); ++i) {
        const double r = 0.5 * R * (gx[i] + 1.0);
        const double w = 0.5 * R * gw[i];
        const double vv = v.radial_value(r);
        if (q < 1e-12) {
            acc += w * vv * 4.0 * pi * r * r;
        } else {
            acc += w * vv * 4.0 * pi * r * std::sin(q * r) / q;
        }
    }
    return acc;
}

Complex born_amplitude(const PotentialSpec& v, double lambda, double theta_sc) {
    if (v.empty()) return 0.0;
    if (!(lambda < 0.0)) throw Error("born_amplitude requires lambda < 0");
    const double k = std::sqrt(-lambda);
    const double q = 2.0 * k * std::sin(0.5 * theta_sc);
    return Complex(-radial_fourier_transform(v, q) / (4.0 * pi), 0.0);
}

} // namespace oracle
} // namespace kscat
