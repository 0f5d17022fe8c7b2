#ifndef KSCAT_LAYER_OPS_HPP
#define KSCAT_LAYER_OPS_HPP

#include <functional>
#include <vector>

#include "kscat/mesh.hpp"
#include "kscat/types.hpp"

namespace kscat {

enum class LimitSide { plus, minus };

/// Spectral parameter: either an interior z (off the cut (-inf, 0]) or a
/// boundary value lambda +- i0 with lambda < 0.  The kernel branch is
/// s = sqrt(z) with Re s >= 0; on the cut, continuity from C^+- gives
/// s = +- i |lambda|^{1/2}.
class SpectralParam {
public:
    static SpectralParam interior(Complex z);
    static SpectralParam boundary(double lambda, LimitSide side);

    bool is_boundary() const { return boundary_; }
    LimitSide side() const { return side_; }
    Complex z() const { return s_ * s_; }
    Complex s() const { return s_; } // branch of sqrt(z)
    double k() const;                // |lambda|^{1/2} for boundary values
    double lambda() const { return lambda_; }

    SpectralParam conj() const;
    bool real_positive() const { return !boundary_ && s_.imag() == 0.0; }

private:
    SpectralParam() = default;
    bool boundary_ = false;
    LimitSide side_ = LimitSide::plus;
    double lambda_ = 0.0;
    Complex s_{1.0, 0.0};
};

/// Free kernel e^{-s|x-y|} / (4 pi |x-y|).
Complex green_kernel(const SpectralParam& z, const Vec3& x, const Vec3& y);
Complex green_kernel_s(Complex s, const Vec3& x, const Vec3& y);
/// grad_x of the kernel.
Eigen::Vector3cd green_kernel_grad(Complex s, const Vec3& x, const Vec3& y);
/// d/dnu(y) of the kernel (double-layer kernel, nu = exterior unit normal).
Complex dl_kernel(Complex s, const Vec3& x, const Vec3& y, const Vec3& nu_y);
/// grad_x of the double-layer kernel.
Eigen::Vector3cd dl_kernel_grad(Complex s, const Vec3& x, const Vec3& y, const Vec3& nu_y);

enum class Space { P0, P1 };
enum class OperatorKind { S, D, Sv, Dv, LambdaHat, Coupling };

/// Dense boundary operator in Galerkin (moment) form.
struct BoundaryOperator {
    MatrixC matrix;
    Space row_space;
    Space col_space;
    SpectralParam z = SpectralParam::interior(Complex(1.0, 0.0));
    OperatorKind kind = OperatorKind::S;
};

/// Weakly singular single-layer Galerkin matrix <psi_i, S_z psi_j> on P0.
BoundaryOperator assemble_S(const SurfaceMesh& mesh, const SpectralParam& z);

/// Hypersingular Galerkin matrix on P1, assembled in the regularized
/// (integration-by-parts) form: <D phi, psi> = -I[g curl.curl] - z I[g (n.n) phi psi].
BoundaryOperator assemble_D(const SurfaceMesh& mesh, const SpectralParam& z);

/// P0 / P1 mass matrices (P0 is diagonal; P1 dense at desk scale).
VectorR p0_mass(const SurfaceMesh& mesh);
MatrixR p1_mass(const SurfaceMesh& mesh);

enum class LayerKind { SL, DL };

/// Layer potential at off-surface points; density given by dof coefficients.
/// Throws PointTooClose when a point is within half the local mesh size.
VectorC evaluate_layer(const SurfaceMesh& mesh, const SpectralParam& z,
                       const VectorC& density, LayerKind kind,
                       const std::vector<Vec3>& points);

/// grad of the layer potential at off-surface points (3 complex components per point).
std::vector<Eigen::Vector3cd> evaluate_layer_gradient(const SurfaceMesh& mesh,
                                                      const SpectralParam& z,
                                                      const VectorC& density, LayerKind kind,
                                                      const std::vector<Vec3>& points);

/// Moment vector of a surface function against the space's basis:
/// m_i = int_Gamma basis_i(y) f(y) dsigma(y).
VectorC trace_moments(const SurfaceMesh& mesh, Space space,
                      const std::function<Complex(const Vec3&, const Vec3&)>& f);

/// Plane-wave trace moments: gamma0 e^{i k xi.y} against P0 (kind SL) or
/// gamma1 e^{i k xi.y} = i k (xi.nu) e^{i k xi.y} against P1 (kind DL).
/// This is the far-field pairing row (unconjugated).
VectorC far_field_row(const SurfaceMesh& mesh, double lambda, LimitSide side,
                      const Vec3& xi, LayerKind kind);

/// Pairwise Galerkin integral over two triangles of an arbitrary kernel with
/// P0/P1 basis factors; exposed for reuse by the dressed-operator assembly.
struct PairQuadratureOptions {
    int adjacent_depth = 2; // graded-subdivision depth for touching pairs
};

} // namespace kscat

#endif
