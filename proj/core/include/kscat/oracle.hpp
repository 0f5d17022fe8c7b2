#ifndef KSCAT_ORACLE_HPP
#define KSCAT_ORACLE_HPP

#include <vector>

#include "kscat/interface_models.hpp"
#include "kscat/layer_ops.hpp"
#include "kscat/potential_ops.hpp"
#include "kscat/types.hpp"

namespace kscat {
/// Independent reference solutions, used only by tests and the oracle-compare
/// mode.  S-matrix entries follow the library's kernel branch (the (+) limit
/// pairs with e^{-ikr}), under which S_l = conj of the textbook e^{+ikr}
/// convention; the partial-wave solver matches its asymptotics accordingly.
namespace oracle {

struct SphereLayerEigenvalues {
    std::vector<Complex> S; // single layer, degree-l harmonic subspace
    std::vector<Complex> D; // hypersingular (gamma1 of the double layer)
};

/// Separation of variables on the radius-a sphere:
///   S_l = (2 s / pi) a^2 i_l(s a) k_l(s a),
///   D_l = (2 s^3 / pi) a^2 i_l'(s a) k_l'(s a).
SphereLayerEigenvalues sphere_layer_eigenvalues(double a, const SpectralParam& z,
                                                int ell_max);

/// 1D radial-quadrature check of the single-layer eigenvalue against the
/// closed form; returns the relative defect (used as a self-test gate).
double sphere_single_layer_quadrature_defect(double a, const SpectralParam& z, int ell);

/// One matched partial wave: w = r R sampled on the radial grid, one-sided
/// logarithmic derivatives R'/R at the interface, and the S-matrix entry.
struct RadialSolution {
    int l = 0;
    std::vector<double> r;
    std::vector<double> w; // real radial solution up to normalization
    double logderiv_in = 0.0; // R'/R at a-, NaN for exterior-only models
    double logderiv_ex = 0.0; // R'/R at a+
    Complex S{1.0, 0.0};
};

RadialSolution radial_solution(double a, const InterfaceModel& model,
                               const PotentialSpec& v, double lambda, int l);

/// Partial-wave S-matrix entries S_l, l = 0..ell_max, for the radius-a sphere
/// with a radial potential and one of the interface models (constant
/// strength).  Radial equation: w'' + (|lambda| + v(r) - l(l+1)/r^2) w = 0.
std::vector<Complex> partial_wave_model(double a, const InterfaceModel& model,
                                        const PotentialSpec& v, double lambda,
                                        int ell_max);

/// Closed-form interface-only (v = 0) S_l assembled from the sphere layer
/// eigenvalues: S_l = 1 - 2 i k a^2 t_l^2 LambdaHat_l with t_l the plane-wave
/// trace factor (j_l(ka) or k j_l'(ka)).
std::vector<Complex> interface_smatrix_closed_form(double a, const InterfaceModel& model,
                                                   double lambda, int ell_max);

/// First Born amplitude at scattering angle theta_sc (radians):
/// f_B = -(1/4pi) vtilde(2 k sin(theta_sc/2)), vtilde the 3D Fourier transform
/// of v; the sign/normalization matches the library's S-matrix kernel through
/// f = -(2 pi i / k) K.
Complex born_amplitude(const PotentialSpec& v, double lambda, double theta_sc);

/// 3D Fourier transform of the radial potential at momentum q (>= 0).
double radial_fourier_transform(const PotentialSpec& v, double q);

} // namespace oracle
} // namespace kscat

#endif
