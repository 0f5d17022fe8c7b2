#include "kscat/potential_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kscat/errors.hpp"

namespace kscat {

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec PotentialSpec::none_potential() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::gaussian(double depth, double sigma, double support_radius,
                                      const Vec3& center) {
    if (sigma <= 0.0 || support_radius <= 0.0)
        throw Error("gaussian potential needs sigma > 0 and support_radius > 0");
    PotentialSpec p;
    p.kind = Kind::gaussian;
    p.depth = depth;
    p.sigma = sigma;
    p.support_radius = support_radius;
    p.center = center;
    return p;
}

PotentialSpec PotentialSpec::from_table_file(const std::string& path, double support_radius,
                                             const Vec3& center) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open potential table " + path);
    PotentialSpec p;
    p.kind = Kind::table;
    p.support_radius = support_radius;
    p.center = center;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double r, v;
        if (ls >> r >> v) {
            p.table_r.push_back(r);
            p.table_v.push_back(v);
        }
    }
    if (p.table_r.size() < 2) throw Error("potential table needs at least two rows");
    for (size_t i = 1; i < p.table_r.size(); ++i)
        if (p.table_r[i] <= p.table_r[i - 1])
            throw Error("potential table radii must be strictly increasing");
    return p;
}

double PotentialSpec::radial_value(double r) const {
    if (kind == Kind::none || r > support_radius) return 0.0;
    if (kind == Kind::gaussian) return depth * std::exp(-r * r / (sigma * sigma));
    // linear interpolation, clamped ends
    if (r <= table_r.front()) return table_v.front();
    if (r >= table_r.back()) return table_v.back();
    const auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
    const size_t i = size_t(it - table_r.begin());
    const double t = (r - table_r[i - 1]) / (table_r[i] - table_r[i - 1]);
    return (1.0 - t) * table_v[i - 1] + t * table_v[i];
}

// ---------------------------------------------------------------------------
// VolumeGrid

VolumeGrid make_volume_grid(const PotentialSpec& pot, double h_vol, int cell_cap) {
    VolumeGrid g;
    g.h = h_vol;
    g.cell_volume = h_vol * h_vol * h_vol;
    g.ball_radius = std::cbrt(3.0 * g.cell_volume / (4.0 * pi));
    if (pot.empty()) return g;
    if (h_vol <= 0.0) throw Error("h_vol must be positive");
    const double R = pot.support_radius;
    const int m = int(std::ceil(R / h_vol));
    for (int ix = -m; ix <= m; ++ix)
        for (int iy = -m; iy <= m; ++iy)
            for (int iz = -m; iz <= m; ++iz) {
                const Vec3 c = pot.center + h_vol * Vec3(ix, iy, iz);
                if ((c - pot.center).norm() > R) continue;
                const double vv = pot.value(c);
                if (vv == 0.0) continue;
                g.centers.push_back(c);
                g.v.push_back(vv);
                if (int(g.centers.size()) > cell_cap)
                    throw Error("volume grid exceeds the configured cell cap (" +
                                std::to_string(cell_cap) + "); increase h_vol");
            }
    return g;
}

MatrixC assemble_volume_resolvent(const VolumeGrid& grid, const SpectralParam& z) {
    const int n = grid.size();
    const Complex s = z.s();
    const Complex zz = z.z();
    MatrixC r(n, n);
    const double vol = grid.cell_volume;
    const double rho = grid.ball_radius;
    const Complex diag = (1.0 - std::exp(-s * rho) * (1.0 + s * rho)) / zz;
    for (int i = 0; i < n; ++i) {
        r(i, i) = diag;
        for (int j = i + 1; j < n; ++j) {
            const Complex val = green_kernel_s(s, grid.centers[size_t(i)], grid.centers[size_t(j)]) * vol;
            r(i, j) = val;
            r(j, i) = val;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// LSFactorization

LSFactorization::LSFactorization(const VolumeGrid& grid, const SpectralParam& z,
                                 double cond_limit)
    : z_(z), n_(grid.size()) {
    if (n_ == 0) return;
    R_ = assemble_volume_resolvent(grid, z);
    v_ = Eigen::Map<const VectorR>(grid.v.data(), n_);
    MatrixC a = MatrixC::Identity(n_, n_) - R_ * v_.asDiagonal().toDenseMatrix().cast<Complex>();
    lu_ = GatedLU(a);
    lu_.require<SingularLS>(cond_limit, "1 - R_z v near-singular at this z");
    MatrixC al = MatrixC::Identity(n_, n_) - v_.asDiagonal().toDenseMatrix().cast<Complex>() * R_;
    lu_left_ = GatedLU(al);
    lu_left_.require<SingularLS>(cond_limit, "1 - v R_z near-singular at this z");
}

VectorC LSFactorization::lambda_apply(const VectorC& u) const {
    if (n_ == 0) return VectorC::Zero(u.size());
    VectorC t = lu_.solve(u);
    return v_.cast<Complex>().asDiagonal() * t;
}

MatrixC LSFactorization::lambda_apply(const MatrixC& u) const {
    if (n_ == 0) return MatrixC::Zero(u.rows(), u.cols());
    MatrixC t = lu_.solve(u);
    return v_.cast<Complex>().asDiagonal() * t;
}

VectorC LSFactorization::lambda_apply_left(const VectorC& u) const {
    if (n_ == 0) return VectorC::Zero(u.size());
    return lu_left_.solve((v_.cast<Complex>().asDiagonal() * u).eval());
}

VectorC LSFactorization::schrodinger_apply(const VectorC& f) const {
    if (n_ == 0) return VectorC::Zero(f.size());
    VectorC rf = R_ * f;
    return rf + R_ * lambda_apply(rf);
}

VectorC schrodinger_resolvent_apply(const VolumeGrid& grid, const LSFactorization& ls,
                                    const VectorC& f_cells,
                                    const std::vector<Vec3>& points) {
    VectorC out = VectorC::Zero(Eigen::Index(points.size()));
    if (grid.empty()) return out;
    // charge view of R^v f = R (f + Lambda^v R f)
    VectorC charge = f_cells + ls.lambda_apply((ls.resolvent() * f_cells).eval());
    for (size_t ip = 0; ip < points.size(); ++ip)
        out[Eigen::Index(ip)] = volume_field(grid, ls.z(), charge, points[ip]);
    return out;
}

// ---------------------------------------------------------------------------
// Field evaluation

namespace {

Complex cell_kernel(const VolumeGrid& grid, Complex s, Complex zz, const Vec3& x,
                    const Vec3& c) {
    const double r = (x - c).norm();
    if (r >= grid.ball_radius)
        return green_kernel_s(s, x, c) * grid.cell_volume;
    // inside the equal-volume ball: analytic ball average
    return (1.0 - std::exp(-s * grid.ball_radius) * (1.0 + s * grid.ball_radius)) / zz;
}

} // namespace

Complex volume_field(const VolumeGrid& grid, const SpectralParam& z, const VectorC& b,
                     const Vec3& x) {
    const Complex s = z.s(), zz = z.z();
    Complex acc = 0.0;
    for (int c = 0; c < grid.size(); ++c)
        acc += cell_kernel(grid, s, zz, x, grid.centers[size_t(c)]) * b[c];
    return acc;
}

Eigen::Vector3cd volume_field_gradient(const VolumeGrid& grid, const SpectralParam& z,
                                       const VectorC& b, const Vec3& x) {
    const Complex s = z.s();
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (int c = 0; c < grid.size(); ++c) {
        const Vec3& xc = grid.centers[size_t(c)];
        const double r = (x - xc).norm();
        if (r >= grid.ball_radius) {
            acc += grid.cell_volume * b[c] * green_kernel_grad(s, x, xc);
        } else {
            // interior of the equal-volume ball: linear-in-displacement field
            acc += b[c] * grid.cell_volume / (4.0 * pi * std::pow(grid.ball_radius, 3)) *
                   (x - xc).cast<Complex>();
        }
    }
    return acc;
}

MatrixC assemble_coupling(const SurfaceMesh& mesh, const VolumeGrid& grid,
                          const SpectralParam& z, LayerKind kind) {
    const int nc = grid.size();
    const int nd = (kind == LayerKind::SL) ? mesh.n_p0() : mesh.n_p1();
    const Complex s = z.s();
    MatrixC c = MatrixC::Zero(nc, nd);
    const auto& bary = SurfaceMesh::quad_bary();

    for (int t = 0; t < mesh.n_p0(); ++t) {
        const auto& tri = mesh.triangles[size_t(t)];
        const Vec3& nu = mesh.normal[size_t(t)];
        const double tri_extent = std::sqrt(mesh.area[size_t(t)]);
        for (int ic = 0; ic < nc; ++ic) {
            const Vec3& xc = grid.centers[size_t(ic)];
            const bool near = ((xc - mesh.centroid[size_t(t)]).norm() <
                               std::max(grid.h, tri_extent) + grid.h);
            auto accumulate = [&](const Vec3& y, const Vec3& by, double w) {
                Complex kv = (kind == LayerKind::SL) ? green_kernel_s(s, xc, y)
                                                     : dl_kernel(s, xc, y, nu);
                if (kind == LayerKind::SL) {
                    c(ic, t) += w * kv;
                } else {
                    for (int i = 0; i < 3; ++i)
                        c(ic, tri[size_t(i)]) += w * by[size_t(i)] * kv;
                }
            };
            if (!near) {
                for (int q = 0; q < SurfaceMesh::quad_order; ++q)
                    accumulate(mesh.quad_point[size_t(t)][size_t(q)], bary[size_t(q)],
                               mesh.quad_weight[size_t(t)][size_t(q)]);
            } else {
                // once-subdivided quadrature for near-surface cells: 4 children,
                // 7 points each
                const Vec3& p0 = mesh.vertices[size_t(tri[0])];
                const Vec3& p1 = mesh.vertices[size_t(tri[1])];
                const Vec3& p2 = mesh.vertices[size_t(tri[2])];
                const Vec3 b0(1, 0, 0), b1(0, 1, 0), b2(0, 0, 1);
                const Vec3 m01b = 0.5 * (b0 + b1), m12b = 0.5 * (b1 + b2), m20b = 0.5 * (b2 + b0);
                const std::array<std::array<Vec3, 3>, 4> children = {
                    std::array<Vec3, 3>{b0, m01b, m20b}, std::array<Vec3, 3>{b1, m12b, m01b},
                    std::array<Vec3, 3>{b2, m20b, m12b}, std::array<Vec3, 3>{m01b, m12b, m20b}};
                for (const auto& ch : children) {
                    for (int q = 0; q < SurfaceMesh::quad_order; ++q) {
                        const Vec3& bq = bary[size_t(q)];
                        const Vec3 by = bq[0] * ch[0] + bq[1] * ch[1] + bq[2] * ch[2];
                        const Vec3 y = by[0] * p0 + by[1] * p1 + by[2] * p2;
                        const double w = 0.25 * mesh.quad_weight[size_t(t)][size_t(q)];
                        // guard against a quadrature node landing inside a cell ball
                        if ((xc - y).norm() < grid.ball_radius) continue;
                        accumulate(y, by, w);
                    }
                }
            }
        }
    }
    return c;
}

DressedOperators dressed_boundary_operators(const SurfaceMesh& mesh, const VolumeGrid& grid,
                                            const SpectralParam& z, double cond_limit) {
    DressedOperators out;
    out.Sv = assemble_S(mesh, z);
    out.Sv.kind = OperatorKind::Sv;
    out.Dv = assemble_D(mesh, z);
    out.Dv.kind = OperatorKind::Dv;
    if (grid.empty()) return out;

    LSFactorization ls(grid, z, cond_limit);
    const MatrixC c0 = assemble_coupling(mesh, grid, z, LayerKind::SL);
    const MatrixC c1 = assemble_coupling(mesh, grid, z, LayerKind::DL);
    const double vol = grid.cell_volume;
    out.Sv.matrix += vol * (c0.transpose() * ls.lambda_apply(c0));
    out.Dv.matrix += vol * (c1.transpose() * ls.lambda_apply(c1));
    return out;
}

VectorC dressed_layer_potential(const SurfaceMesh& mesh, const VolumeGrid& grid,
                                const LSFactorization& ls, const VectorC& density,
                                LayerKind kind, const std::vector<Vec3>& points) {
    VectorC out = evaluate_layer(mesh, ls.z(), density, kind, points);
    if (grid.empty()) return out;
    const MatrixC c = assemble_coupling(mesh, grid, ls.z(), kind);
    const VectorC b = ls.lambda_apply((c * density).eval());
    for (size_t ip = 0; ip < points.size(); ++ip)
        out[Eigen::Index(ip)] += volume_field(grid, ls.z(), b, points[ip]);
    return out;
}

std::vector<Eigen::Vector3cd> dressed_layer_potential_gradient(
    const SurfaceMesh& mesh, const VolumeGrid& grid, const LSFactorization& ls,
    const VectorC& density, LayerKind kind, const std::vector<Vec3>& points) {
    auto out = evaluate_layer_gradient(mesh, ls.z(), density, kind, points);
    if (grid.empty()) return out;
    const MatrixC c = assemble_coupling(mesh, grid, ls.z(), kind);
    const VectorC b = ls.lambda_apply((c * density).eval());
    for (size_t ip = 0; ip < points.size(); ++ip)
        out[ip] += volume_field_gradient(grid, ls.z(), b, points[ip]);
    return out;
}

} // namespace kscat
