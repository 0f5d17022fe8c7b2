#ifndef KSCAT_OPERATOR_CORE_HPP
#define KSCAT_OPERATOR_CORE_HPP

#include <cstdint>
#include <random>

#include "kscat/types.hpp"

namespace kscat {

/// Finite-dimensional stand-in for a self-adjoint operator perturbed through
/// two trace maps and a coupling triple (B0, B1, B2).  Everything in here is a
/// dense matrix; identities that hold abstractly must hold here to roundoff,
/// which is what the sandbox tests exploit.
struct KreinSystem {
    MatrixC A;    // n x n, Hermitian
    MatrixC tau1; // m1 x n
    MatrixC tau2; // m2 x n
    MatrixC B1;   // m1 x m1, Hermitian
    MatrixC B0;   // m2p x m2
    MatrixC B2;   // m2p x m2,  B0 B2^* = B2 B0^*

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index m1() const { return tau1.rows(); }
    Eigen::Index m2() const { return tau2.rows(); }
    Eigen::Index m2p() const { return B0.rows(); }

    /// Hermiticity of A, B1 and the compatibility B0 B2^* = B2 B0^*;
    /// throws InvalidSystem on violation.
    void validate(double tol = 1e-10) const;

    MatrixC tau() const; // (m1+m2) x n stacked trace map
};

/// Free resolvent data at one spectral point.
struct ResolventFamily {
    Complex z;
    MatrixC R;  // (-A + z)^{-1}
    MatrixC G;  // G_z = R_z tau^*
    MatrixC G1; // columns for tau1
    MatrixC G2; // columns for tau2
};

/// All Schur-complement blocks of M^B_z.
struct LambdaBlocks {
    MatrixC M;          // (1 + B0) - (B1 + B2) tau G_z, block matrix
    MatrixC Lambda;     // block-assembled Lambda^B_z
    MatrixC LambdaB1;   // (1 - B1 tau1 G1)^{-1} B1
    MatrixC LambdaB0B2; // (B0 - B2 tau2 G2)^{-1} B2
    MatrixC Sigma;      // (1 - LambdaB0B2 tau2 G1 LambdaB1 tau1 G2)^{-1}
    MatrixC LambdaHat;  // Sigma * LambdaB0B2
};

struct BoundaryResiduals {
    double green_identity;   // Green/pairing identity over a full basis
    double boundary_condition; // (pi1^* B1 (+) B2) tau u = (1 (+) B0) rho u
    double additive_form;    // A_B = A + tau1^* B1 tau1 + tau2^* B0^{-1} B2 tau2
};

ResolventFamily free_resolvent(const KreinSystem& sys, Complex z,
                               double cond_limit = default_cond_limit);

/// R^B_z = R_z + G_z Lambda^B_z G_zbar^*  (direct inversion of M^B_z).
MatrixC krein_resolvent(const KreinSystem& sys, Complex z,
                        double cond_limit = default_cond_limit);

/// Lambda^B_z by direct inversion of the full M^B_z.
MatrixC lambda_direct(const KreinSystem& sys, Complex z,
                      double cond_limit = default_cond_limit);

/// All blocks of the Schur-complement factorization of M^B_z.
LambdaBlocks schur_blocks(const KreinSystem& sys, Complex z,
                          double cond_limit = default_cond_limit);

/// R^{B1}_z + G^{B1}_z LambdaHat^B_z (G^{B1}_zbar)^*; equals krein_resolvent on
/// the common domain.
MatrixC alt_resolvent(const KreinSystem& sys, Complex z,
                      double cond_limit = default_cond_limit);

/// Residuals of the Green identity, the abstract boundary condition and the
/// additive representation, evaluated over the full basis at z.
BoundaryResiduals rho_and_boundary_check(const KreinSystem& sys, Complex z,
                                         double cond_limit = default_cond_limit);

/// Orthogonal projector onto ran(tau1) in C^{m1} (rank-revealing).
MatrixC range_projector(const MatrixC& tau1, double rank_tol = 1e-12);

/// Recovered operator z*I - (R^B_z)^{-1}; Hermitian and z-independent when the
/// triple is admissible.
MatrixC recovered_operator(const KreinSystem& sys, Complex z,
                           double cond_limit = default_cond_limit);

/// Seeded generator of admissible random systems: A from the Gaussian
/// Hermitian ensemble, B1 Hermitian, and (B0, B2) = (C diag(e), C diag(f))
/// with real e, f so that B0 B2^* = B2 B0^* holds by construction.
class SystemSampler {
public:
    explicit SystemSampler(std::uint64_t seed) : rng_(seed) {}

    KreinSystem sample(Eigen::Index n, Eigen::Index m1, Eigen::Index m2,
                       bool invertible_b0 = true);
    /// Pure potential-type triple: B = (1, B1, 0).
    KreinSystem sample_b1_only(Eigen::Index n, Eigen::Index m1, Eigen::Index m2);
    /// Pure singular-type triple: B = (B0, 0, B2).
    KreinSystem sample_b0b2_only(Eigen::Index n, Eigen::Index m1, Eigen::Index m2);

    MatrixC gaussian(Eigen::Index r, Eigen::Index c);
    MatrixC hermitian(Eigen::Index r);

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

} // namespace kscat

#endif
