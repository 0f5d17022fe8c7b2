#ifndef KSCAT_POTENTIAL_OPS_HPP
#define KSCAT_POTENTIAL_OPS_HPP

#include <functional>
#include <string>
#include <vector>

#include "kscat/layer_ops.hpp"
#include "kscat/linalg.hpp"
#include "kscat/mesh.hpp"
#include "kscat/types.hpp"

namespace kscat {

/// Real potential with compact support (enforced by truncation at
/// support_radius; everything outside is exactly zero).
struct PotentialSpec {
    enum class Kind { none, gaussian, table };

    Kind kind = Kind::none;
    double depth = 0.0;          // gaussian: v(r) = depth * exp(-r^2/sigma^2)
    double sigma = 0.5;
    double support_radius = 0.0; // v == 0 outside this radius
    Vec3 center = Vec3::Zero();

    // table: two columns (r, v(r)), linearly interpolated
    std::vector<double> table_r, table_v;

    static PotentialSpec none_potential();
    static PotentialSpec gaussian(double depth, double sigma, double support_radius,
                                  const Vec3& center = Vec3::Zero());
    /// ASCII file with two columns r v(r); '#' comments allowed.
    static PotentialSpec from_table_file(const std::string& path, double support_radius,
                                         const Vec3& center = Vec3::Zero());

    bool empty() const { return kind == Kind::none; }
    double radial_value(double r) const;
    double value(const Vec3& x) const { return radial_value((x - center).norm()); }
};

/// Uniform Cartesian lattice over supp(v); only cells with v != 0 are kept.
struct VolumeGrid {
    std::vector<Vec3> centers;
    std::vector<double> v; // potential samples at the centers
    double h = 0.0;        // lattice spacing
    double cell_volume = 0.0;
    double ball_radius = 0.0; // radius of the equal-volume ball

    int size() const { return int(centers.size()); }
    bool empty() const { return centers.empty(); }
};

/// Builds the lattice covering the support ball.  Throws when the cell count
/// would exceed `cell_cap`.
VolumeGrid make_volume_grid(const PotentialSpec& pot, double h_vol, int cell_cap = 6000);

/// Nystrom matrix of the free resolvent on the grid cells: off-diagonal
/// kernel * cell volume, diagonal the analytic equal-volume-ball value
/// (1 - e^{-s rho}(1 + s rho)) / z.
MatrixC assemble_volume_resolvent(const VolumeGrid& grid, const SpectralParam& z);

/// Cached factorization of (1 - R_z v) on the grid for one spectral point.
class LSFactorization {
public:
    LSFactorization() = default;
    LSFactorization(const VolumeGrid& grid, const SpectralParam& z,
                    double cond_limit = default_cond_limit);

    const SpectralParam& z() const { return z_; }
    const MatrixC& resolvent() const { return R_; }
    double cond() const { return lu_.cond(); }
    bool empty() const { return n_ == 0; }

    /// Lambda^v u = v (1 - R_z v)^{-1} u on cell values.
    VectorC lambda_apply(const VectorC& u) const;
    MatrixC lambda_apply(const MatrixC& u) const;
    /// Alternative factorization (1 - v R_z)^{-1} v u (equal in exact arithmetic).
    VectorC lambda_apply_left(const VectorC& u) const;
    /// R^v_z f = R f + R Lambda^v R f on cells.
    VectorC schrodinger_apply(const VectorC& f) const;

private:
    SpectralParam z_ = SpectralParam::interior(Complex(1.0, 0.0));
    int n_ = 0;
    MatrixC R_;
    VectorR v_;
    GatedLU lu_;       // 1 - R diag(v)
    GatedLU lu_left_;  // 1 - diag(v) R
};

/// R^v_z f on the grid cells plus optional off-grid evaluation points.
VectorC schrodinger_resolvent_apply(const VolumeGrid& grid, const LSFactorization& ls,
                                    const VectorC& f_cells,
                                    const std::vector<Vec3>& points);

/// Field evaluation helpers for cell data: u(x) = sum_c g(x, x_c) b_c * vol,
/// with the equal-volume-ball average replacing the kernel inside a cell ball.
Complex volume_field(const VolumeGrid& grid, const SpectralParam& z, const VectorC& b,
                     const Vec3& x);
Eigen::Vector3cd volume_field_gradient(const VolumeGrid& grid, const SpectralParam& z,
                                       const VectorC& b, const Vec3& x);

/// Boundary -> volume coupling: C[c, j] = (layer potential of basis_j)(x_c).
/// Cells within h_vol of the surface use once-subdivided triangle quadrature.
MatrixC assemble_coupling(const SurfaceMesh& mesh, const VolumeGrid& grid,
                          const SpectralParam& z, LayerKind kind);

struct DressedOperators {
    BoundaryOperator Sv;
    BoundaryOperator Dv;
};

/// S^v = S + vol * C0^T Lambda^v C0,  D^v = D + vol * C1^T Lambda^v C1
/// (transpose, not adjoint: the zbar-evaluated pairing).
DressedOperators dressed_boundary_operators(const SurfaceMesh& mesh, const VolumeGrid& grid,
                                            const SpectralParam& z,
                                            double cond_limit = default_cond_limit);

/// Dressed layer potential at off-surface points:
/// SL^v q = SL q + R Lambda^v SL q (DL^v analogous).
VectorC dressed_layer_potential(const SurfaceMesh& mesh, const VolumeGrid& grid,
                                const LSFactorization& ls, const VectorC& density,
                                LayerKind kind, const std::vector<Vec3>& points);

std::vector<Eigen::Vector3cd> dressed_layer_potential_gradient(
    const SurfaceMesh& mesh, const VolumeGrid& grid, const LSFactorization& ls,
    const VectorC& density, LayerKind kind, const std::vector<Vec3>& points);

} // namespace kscat

#endif
