#include "kscat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "kscat/errors.hpp"
#include "kscat/special.hpp"

namespace kscat {

namespace {

// Degree-5 symmetric 7-point rule (centroid + two orbits), weights in area
// fractions.
struct TriRule {
    std::array<Vec3, SurfaceMesh::quad_order> bary;
    std::array<double, SurfaceMesh::quad_order> w;
};

const TriRule& tri_rule() {
    static const TriRule rule = [] {
        TriRule r;
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
        const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
        r.bary[0] = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        r.w[0] = 9.0 / 40.0;
        int k = 1;
        for (double a : {a1, a2}) {
            double w = (a == a1) ? w1 : w2;
            r.bary[k] = Vec3(1 - 2 * a, a, a); r.w[k++] = w;
            r.bary[k] = Vec3(a, 1 - 2 * a, a); r.w[k++] = w;
            r.bary[k] = Vec3(a, a, 1 - 2 * a); r.w[k++] = w;
        }
        return r;
    }();
    return rule;
}

void finalize(SurfaceMesh& m) {
    const size_t nt = m.triangles.size();
    m.area.resize(nt);
    m.normal.resize(nt);
    m.centroid.resize(nt);
    m.quad_point.resize(nt);
    m.quad_weight.resize(nt);
    m.total_area = 0.0;
    m.max_edge = 0.0;
    double edge_sum = 0.0;
    long edge_n = 0;
    const TriRule& rule = tri_rule();
    for (size_t t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        const Vec3& p0 = m.vertices[size_t(tri[0])];
        const Vec3& p1 = m.vertices[size_t(tri[1])];
        const Vec3& p2 = m.vertices[size_t(tri[2])];
        Vec3 cr = (p1 - p0).cross(p2 - p0);
        double a2 = cr.norm();
        m.area[t] = 0.5 * a2;
        m.normal[t] = cr / a2;
        m.centroid[t] = (p0 + p1 + p2) / 3.0;
        for (int q = 0; q < SurfaceMesh::quad_order; ++q) {
            const Vec3& b = rule.bary[q];
            m.quad_point[t][q] = b[0] * p0 + b[1] * p1 + b[2] * p2;
            m.quad_weight[t][q] = rule.w[q] * m.area[t];
        }
        m.total_area += m.area[t];
        for (int e = 0; e < 3; ++e) {
            double len = (m.vertices[size_t(tri[e])] - m.vertices[size_t(tri[(e + 1) % 3])]).norm();
            m.max_edge = std::max(m.max_edge, len);
            edge_sum += len;
            ++edge_n;
        }
    }
    m.mean_edge = edge_sum / double(edge_n);

    std::map<std::pair<int, int>, int> edges;
    for (const auto& tri : m.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
        }
    m.edge_count = long(edges.size());
}

SurfaceMesh icosahedron() {
    SurfaceMesh m;
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double s = 1.0 / std::sqrt(1.0 + phi * phi);
    auto add = [&](double x, double y, double z) { m.vertices.emplace_back(s * x, s * y, s * z); };
    add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
    add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
    add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
    m.triangles = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

} // namespace

const std::array<Vec3, SurfaceMesh::quad_order>& SurfaceMesh::quad_bary() {
    return tri_rule().bary;
}

double SurfaceMesh::signed_volume() const {
    double v = 0.0;
    for (const auto& tri : triangles) {
        const Vec3& p0 = vertices[size_t(tri[0])];
        const Vec3& p1 = vertices[size_t(tri[1])];
        const Vec3& p2 = vertices[size_t(tri[2])];
        v += p0.dot(p1.cross(p2)) / 6.0;
    }
    return v;
}

namespace {

// exact point-triangle distance (projection onto the plane, then clamping to
// the closest feature)
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return (p - (a + v * ab)).norm();
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return (p - (a + w * ac)).norm();
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + v * ab + w * ac)).norm();
}

} // namespace

double SurfaceMesh::distance(const Vec3& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < triangles.size(); ++t) {
        // cheap reject on the centroid ball
        const double dc = (x - centroid[t]).norm();
        if (dc - 2.0 * std::sqrt(area[t]) > d) continue;
        const auto& tri = triangles[t];
        d = std::min(d, point_triangle_distance(x, vertices[size_t(tri[0])],
                                                vertices[size_t(tri[1])],
                                                vertices[size_t(tri[2])]));
    }
    return d;
}

void SurfaceMesh::validate() const {
    std::map<std::pair<int, int>, int> edges;
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tri : triangles)
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
            directed[{a, b}]++;
        }
    for (const auto& [e, c] : edges)
        if (c != 2) throw InvalidMesh("edge not shared by exactly two triangles");
    for (const auto& [e, c] : directed)
        if (c != 1) throw InvalidMesh("inconsistent triangle orientation");
    if (signed_volume() <= 0.0) throw InvalidMesh("orientation not outward");
    for (size_t t = 0; t < triangles.size(); ++t) {
        double s = 0.0;
        for (int q = 0; q < quad_order; ++q) s += quad_weight[t][q];
        if (std::abs(s - area[t]) > 1e-12 * area[t])
            throw InvalidMesh("quadrature weights do not sum to the area");
    }
}

void SurfaceMesh::export_off(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "OFF\n" << vertices.size() << " " << triangles.size() << " " << edge_count << "\n";
    out.precision(17);
    for (const auto& v : vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
    for (const auto& t : triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

SurfaceMesh make_sphere(double radius, int level) {
    if (radius <= 0.0) throw InvalidMesh("radius must be positive");
    if (level < 0 || level > max_subdivision_level)
        throw InvalidMesh("subdivision level outside [0, 7]");
    SurfaceMesh m = icosahedron();
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = (m.vertices[size_t(a)] + m.vertices[size_t(b)]).normalized();
            m.vertices.push_back(p);
            int idx = int(m.vertices.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            int a = mid(t[0], t[1]), b = mid(t[1], t[2]), c = mid(t[2], t[0]);
            next.push_back({t[0], a, c});
            next.push_back({t[1], b, a});
            next.push_back({t[2], c, b});
            next.push_back({a, b, c});
        }
        m.triangles = std::move(next);
    }
    for (auto& v : m.vertices) v = radius * v.normalized();
    finalize(m);
    return m;
}

SurfaceMesh make_ellipsoid(double ax, double ay, double az, int level) {
    if (ax <= 0 || ay <= 0 || az <= 0) throw InvalidMesh("semi-axes must be positive");
    SurfaceMesh m = make_sphere(1.0, level);
    for (auto& v : m.vertices) v = Vec3(ax * v[0], ay * v[1], az * v[2]);
    finalize(m);
    return m;
}

DirectionSet direction_quadrature(int n_polar) {
    if (n_polar < 2) throw Error("direction_quadrature: n_polar must be >= 2");
    std::vector<double> ct, wt;
    gauss_legendre(n_polar, ct, wt);
    const int n_az = 2 * n_polar;
    DirectionSet d;
    d.directions.reserve(size_t(n_polar) * n_az);
    d.weights.reserve(size_t(n_polar) * n_az);
    for (int i = 0; i < n_polar; ++i) {
        const double c = ct[size_t(i)];
        const double s = std::sqrt(1.0 - c * c);
        for (int j = 0; j < n_az; ++j) {
            const double phi = 2.0 * pi * j / n_az;
            d.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
            d.weights.push_back(wt[size_t(i)] * 2.0 * pi / n_az);
        }
    }
    // antipode of (i, j) is (n_polar-1-i, j+n_az/2): GL nodes are symmetric.
    d.antipode.resize(d.directions.size());
    for (int i = 0; i < n_polar; ++i)
        for (int j = 0; j < n_az; ++j) {
            int from = i * n_az + j;
            int to = (n_polar - 1 - i) * n_az + (j + n_az / 2) % n_az;
            d.antipode[size_t(from)] = to;
        }
    return d;
}

} // namespace kscat
