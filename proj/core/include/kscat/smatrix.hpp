#ifndef KSCAT_SMATRIX_HPP
#define KSCAT_SMATRIX_HPP

#include <string>
#include <utility>
#include <vector>

#include "kscat/interface_models.hpp"
#include "kscat/mesh.hpp"
#include "kscat/operator_core.hpp"
#include "kscat/types.hpp"

namespace kscat {

/// On-shell scattering matrix over a direction quadrature.  The stored matrix
/// is the smooth kernel K; the discrete unitary operator is
/// S = I + K * diag(w).  Convention: the (+) boundary limit of the decaying
/// kernel branch, under which S is the complex conjugate of the textbook
/// e^{+ikr} convention (recorded in `convention`).
struct ScatteringMatrix {
    double lambda = -1.0;
    double k = 1.0;
    DirectionSet directions;
    MatrixC kernel;
    std::string convention =
        "outgoing e^{-ikr}; S_l = exp(-2 i delta_l^phys) (conjugate of the "
        "e^{+ikr} convention)";

    MatrixC op_matrix() const; // I + K W
    double unitarity_defect() const;   // ||S^* W S - W||_2 / ||W||_2
    double reciprocity_defect() const; // kernel(xi, xi') vs kernel(-xi', -xi)
};

/// Result of applying the coupled 2x2 block Lambda^{B,+} to the incident
/// plane-wave pair of direction xi.
struct PairOutput {
    VectorC volume;   // values on the grid cells
    VectorC boundary; // trace-space density coefficients
};

/// Applies the block [Lambda^v + Lambda^v G2 LambdaHat G2bar* Lambda^v, ...]
/// to (plane wave on the grid, tau2-trace of the plane wave on Gamma).
PairOutput lambda_plus_pair_apply(const ModelSystem& msys, const Vec3& xi);

/// Assembles the full kernel over the direction set.  `msys` must be built at
/// the boundary parameter (lambda, +).
ScatteringMatrix smatrix_assemble(const ModelSystem& msys, const DirectionSet& dirs);

/// Kernel entry for arbitrary (not necessarily quadrature) directions.
Complex smatrix_kernel_entry(const ModelSystem& msys, const Vec3& xi_out, const Vec3& xi_in);

/// Legendre projection onto the degree-l harmonic subspaces:
/// S_l = 1 + (1/4pi) sum_ij w_i w_j P_l(xi_i . xi_j) K_ij.
/// Throws NotRadial when the kernel is not a function of xi_i . xi_j within 5%.
std::vector<Complex> phase_shifts(const ScatteringMatrix& sm, int ell_max);

/// Amplitude f = -(2 pi i / k) K and cross sections, computed two ways
/// (angular integration of |f|^2 and the optical-theorem forward value).
struct AmplitudeTable {
    MatrixC f;                      // f(xi_i ; xi_j)
    MatrixR dsigma;                 // differential cross section |f|^2
    VectorR sigma_by_direction;     // integrated, per incident direction
    VectorR sigma_optical_by_direction;
    double sigma_integrated = 0.0;  // means over incident directions
    double sigma_optical = 0.0;
};

AmplitudeTable cross_sections(const ScatteringMatrix& sm);

/// Finite-dimensional sandbox for the mu-independence of the spectral pairing
/// map L_lambda = (mu - lambda) (F G_mu .)_lambda, with F the exact
/// eigendecomposition of A.  The Lambda factor is evaluated at a fixed
/// regularized point shared by both mu values, so any difference isolates the
/// mu-dependence of L.
struct MuIndependenceReport {
    double pairing_defect;  // relative difference of L(mu1) vs L(mu2)
    double smatrix_defect;  // relative difference of the assembled S blocks
};

MuIndependenceReport mu_independence_check(const KreinSystem& sys, int eigen_index,
                                           double mu1, double mu2,
                                           double epsilon = 1e-3);

} // namespace kscat

#endif
