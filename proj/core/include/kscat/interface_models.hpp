#ifndef KSCAT_INTERFACE_MODELS_HPP
#define KSCAT_INTERFACE_MODELS_HPP

#include <vector>

#include "kscat/layer_ops.hpp"
#include "kscat/potential_ops.hpp"

namespace kscat {

/// Interface condition on Gamma.  Jump orientation is in - ex with nu the
/// exterior normal and gamma1 the averaged normal derivative; in that
/// dictionary the conditions read
///   delta(alpha):      [gamma1]u = alpha gamma0 u,   gamma0 continuous
///   dirichlet:         gamma0 u = 0 from both sides
///   neumann:           gamma1 u = 0 from both sides
///   delta_prime(theta): gamma1 u = -theta [gamma0]u, gamma1 continuous
struct InterfaceModel {
    enum class Variant { none, delta, dirichlet, neumann, delta_prime };

    Variant variant = Variant::none;
    double strength = 0.0;                // constant alpha or theta
    std::vector<double> vertex_strength;  // optional P1 samples (overrides constant)

    static InterfaceModel none();
    static InterfaceModel delta(double alpha);
    static InterfaceModel delta_vertexwise(std::vector<double> alpha_at_vertices);
    static InterfaceModel dirichlet();
    static InterfaceModel neumann();
    static InterfaceModel delta_prime(double theta);

    bool is_none() const { return variant == Variant::none; }
    /// P1 trace models (neumann, delta_prime) pair against hats; P0 models
    /// (delta, dirichlet) against panel indicators.
    Space trace_space() const;
    LayerKind layer_kind() const;
};

/// Volume source: cell data on the grid plus optional point charges.
struct VolumeSource {
    VectorC cell_values; // size grid.size() or empty
    struct PointCharge {
        Vec3 x;
        Complex strength;
    };
    std::vector<PointCharge> points;
};

/// Field produced by a resolvent application: a sum of volume cell charges,
/// point charges and one boundary layer density.
class FieldEval {
public:
    Complex value(const Vec3& x) const;
    Eigen::Vector3cd gradient(const Vec3& x) const;

    const VectorC& boundary_density() const { return density_; }
    const VectorC& cell_values() const { return u_cells_; }

private:
    friend class ModelSystem;
    const SurfaceMesh* mesh_ = nullptr;
    const VolumeGrid* grid_ = nullptr;
    SpectralParam z_ = SpectralParam::interior(Complex(1.0, 0.0));
    VectorC cell_charge_;  // paired with the free kernel (times cell volume)
    std::vector<VolumeSource::PointCharge> point_charges_;
    VectorC density_;      // boundary density fed to the bare layer potential
    LayerKind kind_ = LayerKind::SL;
    bool has_layer_ = false;
    VectorC u_cells_;      // field values on the grid cells
};

/// Assembled model at one spectral point: dressed boundary operator, the
/// interface operator LambdaHat in factored form, and the LS machinery.
class ModelSystem {
public:
    ModelSystem(const SurfaceMesh& mesh, const VolumeGrid& grid, InterfaceModel model,
                const SpectralParam& z, double cond_limit = default_cond_limit);

    const SpectralParam& z() const { return z_; }
    const InterfaceModel& model() const { return model_; }
    const SurfaceMesh& mesh() const { return *mesh_; }
    const VolumeGrid& grid() const { return *grid_; }
    const LSFactorization& ls() const { return ls_; }
    const MatrixC& coupling() const { return coupling_; }       // cells x dofs
    const MatrixC& dressed_matrix() const { return dressed_; }  // S^v or D^v Galerkin
    double lambda_hat_cond() const { return lambda_hat_cond_; }

    /// Galerkin LambdaHat: moments in, density coefficients out.
    /// (none-model: returns zero density.)
    VectorC lambda_hat_apply(const VectorC& moments) const;
    MatrixC lambda_hat_matrix() const; // dense, for tests and bitwise checks

    /// Trace moments of a smooth field against the model's trace space
    /// (gamma0 for SL-type models, gamma1 for DL-type).
    VectorC trace_moments_of(const FieldEval& t) const;

    /// u = R^{B}_z f: (i) t = R^v f, (ii) g = trace of t, (iii) u = t + layer(LambdaHat g).
    FieldEval perturbed_resolvent_apply(const VolumeSource& f) const;

    /// Relative residual of the model's interface condition for the field
    /// produced by `f`, measured over triangle centroids.
    double boundary_condition_residual(const VolumeSource& f) const;

    /// t = R^v f only (no interface correction).
    FieldEval free_dressed_field(const VolumeSource& f) const;

private:
    const SurfaceMesh* mesh_;
    const VolumeGrid* grid_;
    InterfaceModel model_;
    SpectralParam z_;
    double cond_limit_;

    LSFactorization ls_;
    MatrixC dressed_;   // Galerkin S^v (P0) or D^v (P1)
    MatrixC coupling_;  // C0 or C1
    GatedLU hat_lu_;    // W in q = W^{-1} P m
    MatrixC hat_pre_;   // P (identity except for the delta model)
    double lambda_hat_cond_ = 0.0;

    FieldEval make_field(const VolumeSource& f, const VectorC* density) const;
};

/// One-sided surface traces by normal-offset Richardson extrapolation at
/// distances (h, 2h) from the surface.
struct SurfaceTraces {
    VectorC gamma0_in, gamma0_ex; // values per triangle centroid
    VectorC gamma1_in, gamma1_ex; // normal derivatives (exterior normal)
    VectorC jump0() const { return gamma0_in - gamma0_ex; }
    VectorC jump1() const { return gamma1_in - gamma1_ex; }
    VectorC avg0() const { return 0.5 * (gamma0_in + gamma0_ex); }
    VectorC avg1() const { return 0.5 * (gamma1_in + gamma1_ex); }
};

SurfaceTraces surface_traces(const SurfaceMesh& mesh, const FieldEval& u,
                             double offset_scale = 1.0);

/// Delta-model consistency between the dressed-operator resolvent and the
/// 2x2 block (Schur) resolvent; returns the max relative field difference
/// over the probe points.
double delta_schur_consistency(const ModelSystem& msys, const VolumeSource& f,
                               const std::vector<Vec3>& probes);

} // namespace kscat

#endif
