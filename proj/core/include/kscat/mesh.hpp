#ifndef KSCAT_MESH_HPP
#define KSCAT_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "kscat/types.hpp"

namespace kscat {

/// Triangulated closed surface with per-triangle quadrature and dof maps for
/// piecewise-constant (P0, one dof per triangle) and continuous piecewise
/// linear (P1, one dof per vertex) spaces.
struct SurfaceMesh {
    static constexpr int quad_order = 7; // degree-5 symmetric triangle rule

    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    std::vector<double> area;     // per triangle
    std::vector<Vec3> normal;     // per triangle, unit, outward
    std::vector<Vec3> centroid;   // per triangle
    std::vector<std::array<Vec3, quad_order>> quad_point;    // per triangle
    std::vector<std::array<double, quad_order>> quad_weight; // sum to the area
    // barycentric coordinates of the rule (shared by all triangles)
    static const std::array<Vec3, quad_order>& quad_bary();

    double total_area = 0.0;
    double max_edge = 0.0;
    double mean_edge = 0.0;
    long edge_count = 0;

    int n_p0() const { return int(triangles.size()); }
    int n_p1() const { return int(vertices.size()); }
    long euler_characteristic() const {
        return long(vertices.size()) - edge_count + long(triangles.size());
    }

    Vec3 point(int tri, const Vec3& bary) const {
        const auto& t = triangles[size_t(tri)];
        return bary[0] * vertices[size_t(t[0])] + bary[1] * vertices[size_t(t[1])] +
               bary[2] * vertices[size_t(t[2])];
    }

    /// P1 hat-function values at a barycentric point of triangle `tri`,
    /// ordered like the triangle's vertex indices.
    static Vec3 p1_values(const Vec3& bary) { return bary; }

    /// Signed volume enclosed by the surface (positive for outward orientation).
    double signed_volume() const;

    /// Distance from x to the surface, approximated over triangle planes.
    double distance(const Vec3& x) const;

    /// Validates closedness (every edge shared by exactly two triangles),
    /// orientation consistency and quadrature weights; throws InvalidMesh.
    void validate() const;

    /// ASCII OFF export (counts header, vertex lines, face lines).
    void export_off(const std::string& path) const;
};

inline constexpr int max_subdivision_level = 7;

/// Icosahedral subdivision projected to the sphere; 20 * 4^level triangles.
SurfaceMesh make_sphere(double radius, int level);

/// Anisotropic scaling of the sphere mesh with recomputed normals/areas.
SurfaceMesh make_ellipsoid(double ax, double ay, double az, int level);

/// Quadrature directions on S^2 with weights summing to 4*pi.
struct DirectionSet {
    std::vector<Vec3> directions; // unit vectors
    std::vector<double> weights;  // positive, sum 4*pi
    std::vector<int> antipode;    // index of -xi_i in the set

    int size() const { return int(directions.size()); }
};

/// Gauss-Legendre in cos(theta) x uniform azimuth (2*n_polar nodes); exact for
/// spherical harmonics through degree 2*n_polar - 1.
DirectionSet direction_quadrature(int n_polar);

} // namespace kscat

#endif
