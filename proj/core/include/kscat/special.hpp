#ifndef KSCAT_SPECIAL_HPP
#define KSCAT_SPECIAL_HPP

#include <vector>

#include "kscat/types.hpp"

namespace kscat {

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Modified spherical Bessel functions, conventions
///   i_l(x) ~ x^l/(2l+1)!!  near 0,       k_l(x) = (pi/2) e^{-x}/x at l = 0,
/// valid for complex x with Re x >= 0 (principal resolvent branch).
Complex mod_sph_i(int l, Complex x);
Complex mod_sph_k(int l, Complex x);
Complex mod_sph_i_deriv(int l, Complex x);
Complex mod_sph_k_deriv(int l, Complex x);

/// Spherical Bessel j_l, y_l and derivatives for real positive argument.
double sph_j(int l, double x);
double sph_y(int l, double x);
double sph_j_deriv(int l, double x);
double sph_y_deriv(int l, double x);

/// Legendre polynomial P_l(t), |t| <= 1.
double legendre_p(int l, double t);

} // namespace kscat

#endif
