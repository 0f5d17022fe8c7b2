#include "kscat/special.hpp"

#include <cmath>

#include "kscat/errors.hpp"

namespace kscat {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p = std::legendre(n, x);
            double pm = std::legendre(n - 1, x);
            double dp = n * (x * p - pm) / (x * x - 1.0);
            double dx = -p / dp;
            x += dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p = std::legendre(n, x);
        double pm = std::legendre(n - 1, x);
        double dp = n * (x * p - pm) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

Complex mod_sph_i(int l, Complex x) {
    // Power series i_l(x) = sum_m x^{l+2m} / (2^m m! (2l+2m+1)!!); converges
    // fast for the moderate |x| this library uses (|x| <~ 60).
    if (x == Complex(0.0)) return l == 0 ? Complex(1.0) : Complex(0.0);
    Complex xl = 1.0;
    double dfact = 1.0; // (2l+1)!!
    for (int j = 0; j < l; ++j) {
        xl *= x;
        dfact *= 2.0 * j + 3.0;
    }
    Complex term = xl / dfact;
    Complex sum = term;
    const Complex x2h = 0.5 * x * x;
    for (int m = 1; m < 400; ++m) {
        term *= x2h / (double(m) * (2.0 * (l + m) + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

Complex mod_sph_k(int l, Complex x) {
    // Upward recurrence is stable for k_l (it grows with l).
    const Complex k0 = 0.5 * pi * std::exp(-x) / x;
    if (l == 0) return k0;
    const Complex k1 = k0 * (1.0 + 1.0 / x);
    if (l == 1) return k1;
    Complex km = k0, kc = k1;
    for (int j = 1; j < l; ++j) {
        Complex kn = km + (2.0 * j + 1.0) / x * kc;
        km = kc;
        kc = kn;
    }
    return kc;
}

Complex mod_sph_i_deriv(int l, Complex x) {
    if (l == 0) return mod_sph_i(1, x); // i0' = i1
    return mod_sph_i(l - 1, x) - (double(l) + 1.0) / x * mod_sph_i(l, x);
}

Complex mod_sph_k_deriv(int l, Complex x) {
    // k_{-1} = k_0 (half-integer Macdonald symmetry).
    const Complex km1 = (l == 0) ? mod_sph_k(0, x) : mod_sph_k(l - 1, x);
    return -km1 - (double(l) + 1.0) / x * mod_sph_k(l, x);
}

double sph_j(int l, double x) { return std::sph_bessel(unsigned(l), x); }
double sph_y(int l, double x) { return std::sph_neumann(unsigned(l), x); }

double sph_j_deriv(int l, double x) {
    return double(l) / x * sph_j(l, x) - sph_j(l + 1, x);
}

double sph_y_deriv(int l, double x) {
    return double(l) / x * sph_y(l, x) - sph_y(l + 1, x);
}

double legendre_p(int l, double t) { return std::legendre(unsigned(l), t); }

} // namespace kscat
