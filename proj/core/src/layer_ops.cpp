#include "kscat/layer_ops.hpp"

#include <cmath>

#include "kscat/errors.hpp"
#include "kscat/special.hpp"

namespace kscat {

// ---------------------------------------------------------------------------
// SpectralParam

SpectralParam SpectralParam::interior(Complex z) {
    if (z.imag() == 0.0 && z.real() <= 0.0)
        throw InvalidSpectralParam("interior z must avoid the cut (-inf, 0]");
    SpectralParam p;
    p.boundary_ = false;
    p.s_ = std::sqrt(z); // principal branch, Re >= 0
    return p;
}

SpectralParam SpectralParam::boundary(double lambda, LimitSide side) {
    if (!(lambda < 0.0))
        throw InvalidSpectralParam("boundary value requires lambda < 0");
    SpectralParam p;
    p.boundary_ = true;
    p.side_ = side;
    p.lambda_ = lambda;
    const double k = std::sqrt(-lambda);
    p.s_ = (side == LimitSide::plus) ? Complex(0.0, k) : Complex(0.0, -k);
    return p;
}

double SpectralParam::k() const {
    if (!boundary_) throw InvalidSpectralParam("k() is defined for boundary values");
    return std::abs(s_.imag());
}

SpectralParam SpectralParam::conj() const {
    SpectralParam p = *this;
    if (boundary_)
        p.side_ = (side_ == LimitSide::plus) ? LimitSide::minus : LimitSide::plus;
    p.s_ = std::conj(s_);
    return p;
}

// ---------------------------------------------------------------------------
// Kernels

Complex green_kernel_s(Complex s, const Vec3& x, const Vec3& y) {
    const double r = (x - y).norm();
    if (r == 0.0) throw CoincidentPoints();
    return std::exp(-s * r) / (4.0 * pi * r);
}

Complex green_kernel(const SpectralParam& z, const Vec3& x, const Vec3& y) {
    return green_kernel_s(z.s(), x, y);
}

Eigen::Vector3cd green_kernel_grad(Complex s, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r == 0.0) throw CoincidentPoints();
    const Complex g = std::exp(-s * r) / (4.0 * pi * r);
    const Complex fac = -g * (s + 1.0 / r) / r;
    return fac * d.cast<Complex>();
}

Complex dl_kernel(Complex s, const Vec3& x, const Vec3& y, const Vec3& nu_y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r == 0.0) throw CoincidentPoints();
    const Complex g = std::exp(-s * r) / (4.0 * pi * r);
    return g * (s + 1.0 / r) * d.dot(nu_y) / r;
}

Eigen::Vector3cd dl_kernel_grad(Complex s, const Vec3& x, const Vec3& y, const Vec3& nu_y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r == 0.0) throw CoincidentPoints();
    const Complex er = std::exp(-s * r);
    const Complex c = er * (s * r + 1.0) / (4.0 * pi * r * r * r);
    const Complex cp = -er * (s * s * r * r + 3.0 * s * r + 3.0) / (4.0 * pi * r * r * r * r);
    return cp * d.dot(nu_y) / r * d.cast<Complex>() + c * nu_y.cast<Complex>();
}

// ---------------------------------------------------------------------------
// Triangle-pair quadrature machinery

namespace {

const std::array<double, 7>& rule_weights() {
    static const std::array<double, 7> w = [] {
        const double s15 = std::sqrt(15.0);
        const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
        return std::array<double, 7>{9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    }();
    return w;
}

const std::vector<double>& duffy_nodes();
const std::vector<double>& duffy_weights();

// Triangle panel carrying both 3D vertices and barycentric coordinates with
// respect to the mesh triangle it came from, so P1 hats survive subdivision.
struct Panel {
    Vec3 p[3];
    Vec3 b[3];
    double area = 0.0;
    void finish() { area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm(); }
};

Panel root_panel(const SurfaceMesh& m, int t) {
    Panel pa;
    for (int i = 0; i < 3; ++i) {
        pa.p[i] = m.vertices[size_t(m.triangles[size_t(t)][size_t(i)])];
        pa.b[i] = Vec3::Zero();
        pa.b[i][i] = 1.0;
    }
    pa.finish();
    return pa;
}

std::array<Panel, 4> split(const Panel& in) {
    const Vec3 m01 = 0.5 * (in.p[0] + in.p[1]), m12 = 0.5 * (in.p[1] + in.p[2]),
               m20 = 0.5 * (in.p[2] + in.p[0]);
    const Vec3 b01 = 0.5 * (in.b[0] + in.b[1]), b12 = 0.5 * (in.b[1] + in.b[2]),
               b20 = 0.5 * (in.b[2] + in.b[0]);
    std::array<Panel, 4> out{
        Panel{{in.p[0], m01, m20}, {in.b[0], b01, b20}},
        Panel{{in.p[1], m12, m01}, {in.b[1], b12, b01}},
        Panel{{in.p[2], m20, m12}, {in.b[2], b20, b12}},
        Panel{{m01, m12, m20}, {b01, b12, b20}}};
    for (auto& p : out) p.finish();
    return out;
}

bool touching(const Panel& a, const Panel& b, double tol) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if ((a.p[i] - b.p[j]).squaredNorm() <= tol * tol) return true;
    return false;
}

// F(x, bary_x, y, bary_y, weight) -> void; enumerates quadrature point pairs.
template <class F>
void quad_pair_regular(const Panel& pa, const Panel& pb, const F& f) {
    const auto& bary = SurfaceMesh::quad_bary();
    const auto& wf = rule_weights();
    for (int qa = 0; qa < 7; ++qa) {
        const Vec3& ba = bary[size_t(qa)];
        const Vec3 xa = ba[0] * pa.p[0] + ba[1] * pa.p[1] + ba[2] * pa.p[2];
        const Vec3 bxa = ba[0] * pa.b[0] + ba[1] * pa.b[1] + ba[2] * pa.b[2];
        const double wa = wf[size_t(qa)] * pa.area;
        for (int qb = 0; qb < 7; ++qb) {
            const Vec3& bb = bary[size_t(qb)];
            const Vec3 xb = bb[0] * pb.p[0] + bb[1] * pb.p[1] + bb[2] * pb.p[2];
            const Vec3 bxb = bb[0] * pb.b[0] + bb[1] * pb.b[1] + bb[2] * pb.b[2];
            f(xa, bxa, xb, bxb, wa * wf[size_t(qb)] * pb.area);
        }
    }
}

template <class F>
void quad_pair_adjacent(const Panel& pa, const Panel& pb, int depth, double tol,
                        const F& f) {
    if (depth <= 0) {
        quad_pair_regular(pa, pb, f);
        return;
    }
    const auto ca = split(pa);
    const auto cb = split(pb);
    for (const auto& a : ca)
        for (const auto& b : cb) {
            if (touching(a, b, tol))
                quad_pair_adjacent(a, b, depth - 1, tol, f);
            else
                quad_pair_regular(a, b, f);
        }
}

// Self pair: outer 7-point rule, inner Duffy fan with apex at the outer node.
template <class F>
void quad_pair_self(const Panel& pa, const F& f) {
    const auto& bary = SurfaceMesh::quad_bary();
    const auto& wf = rule_weights();
    const auto& gx = duffy_nodes();
    const auto& gw = duffy_weights();

    for (int qa = 0; qa < 7; ++qa) {
        const Vec3& ba = bary[size_t(qa)];
        const Vec3 xa = ba[0] * pa.p[0] + ba[1] * pa.p[1] + ba[2] * pa.p[2];
        const Vec3 bxa = ba[0] * pa.b[0] + ba[1] * pa.b[1] + ba[2] * pa.b[2];
        const double wa = wf[size_t(qa)] * pa.area;
        for (int e = 0; e < 3; ++e) {
            const Vec3 &B3 = pa.p[e], &C3 = pa.p[(e + 1) % 3];
            const Vec3 &Bb = pa.b[e], &Cb = pa.b[(e + 1) % 3];
            const double sub_area = 0.5 * (B3 - xa).cross(C3 - xa).norm();
            if (sub_area < 1e-300) continue;
            for (size_t iu = 0; iu < gx.size(); ++iu) {
                const double u = 0.5 * (gx[iu] + 1.0), wu = 0.5 * gw[iu];
                for (size_t iv = 0; iv < gx.size(); ++iv) {
                    const double v = 0.5 * (gx[iv] + 1.0), wv = 0.5 * gw[iv];
                    // y = A + u (B - A) + u v (C - B), dsigma = 2 area u du dv
                    const Vec3 y = xa + u * ((B3 - xa) + v * (C3 - B3));
                    const Vec3 by = bxa + u * ((Bb - bxa) + v * (Cb - Bb));
                    f(xa, bxa, y, by, wa * wu * wv * 2.0 * sub_area * u);
                }
            }
        }
    }
}

const std::vector<double>& duffy_nodes() {
    static std::vector<double> x, w;
    if (x.empty()) gauss_legendre(6, x, w);
    return x;
}
const std::vector<double>& duffy_weights() {
    static std::vector<double> x, w;
    if (w.empty()) gauss_legendre(6, x, w);
    return w;
}

enum class Adjacency { none, touching, self };

Adjacency classify(const SurfaceMesh& m, int ta, int tb) {
    if (ta == tb) return Adjacency::self;
    const auto& a = m.triangles[size_t(ta)];
    const auto& b = m.triangles[size_t(tb)];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] == b[j]) return Adjacency::touching;
    return Adjacency::none;
}

template <class F>
void for_each_quad_pair(const SurfaceMesh& m, int ta, int tb, int depth, const F& f) {
    const Panel pa = root_panel(m, ta);
    const Panel pb = root_panel(m, tb);
    switch (classify(m, ta, tb)) {
        case Adjacency::self:
            quad_pair_self(pa, f);
            break;
        case Adjacency::touching:
            quad_pair_adjacent(pa, pb, depth, 1e-9 * m.mean_edge, f);
            break;
        default:
            quad_pair_regular(pa, pb, f);
    }
}

// In-plane gradient of the P1 hat at local vertex i of triangle t.
Vec3 hat_gradient(const SurfaceMesh& m, int t, int i) {
    const auto& tri = m.triangles[size_t(t)];
    const Vec3& pi = m.vertices[size_t(tri[size_t(i)])];
    const Vec3& pj = m.vertices[size_t(tri[size_t((i + 1) % 3)])];
    const Vec3& pk = m.vertices[size_t(tri[size_t((i + 2) % 3)])];
    // gradient is perpendicular to the opposite edge, in the triangle plane
    const Vec3 e = pk - pj;
    Vec3 h = (pi - pj) - (pi - pj).dot(e) / e.squaredNorm() * e;
    return h / h.squaredNorm();
}

} // namespace

// ---------------------------------------------------------------------------
// Galerkin assembly

BoundaryOperator assemble_S(const SurfaceMesh& mesh, const SpectralParam& z) {
    const int n = mesh.n_p0();
    const Complex s = z.s();
    MatrixC a(n, n);
    const PairQuadratureOptions opt;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Complex v = 0.0;
            for_each_quad_pair(mesh, i, j, opt.adjacent_depth,
                               [&](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&,
                                   double w) { v += w * green_kernel_s(s, x, y); });
            a(i, j) = v;
            a(j, i) = v; // symmetric kernel
        }
    }
    BoundaryOperator op;
    op.matrix = std::move(a);
    op.row_space = op.col_space = Space::P0;
    op.z = z;
    op.kind = OperatorKind::S;
    return op;
}

BoundaryOperator assemble_D(const SurfaceMesh& mesh, const SpectralParam& z) {
    const int nv = mesh.n_p1();
    const int nt = mesh.n_p0();
    const Complex s = z.s();
    const Complex zz = z.z();
    MatrixC a = MatrixC::Zero(nv, nv);
    const PairQuadratureOptions opt;

    // Surface-curl factors: curl phi_i = nu x grad phi_i, constant per triangle.
    std::vector<std::array<Vec3, 3>> curl;
    curl.resize(size_t(nt));
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 3; ++i)
            curl[size_t(t)][size_t(i)] = mesh.normal[size_t(t)].cross(hat_gradient(mesh, t, i));

    // Regularized form: <D phi_b, phi_a> = -I2[g curl_a.curl_b]
    //                                      - z I2[g (nu_a.nu_b) phi_a phi_b].
    for (int ta = 0; ta < nt; ++ta) {
        for (int tb = ta; tb < nt; ++tb) {
            const double nn = mesh.normal[size_t(ta)].dot(mesh.normal[size_t(tb)]);
            Eigen::Matrix3cd blk = Eigen::Matrix3cd::Zero();
            Eigen::Matrix3d cc;
            for (int ia = 0; ia < 3; ++ia)
                for (int ib = 0; ib < 3; ++ib)
                    cc(ia, ib) = curl[size_t(ta)][size_t(ia)].dot(curl[size_t(tb)][size_t(ib)]);
            for_each_quad_pair(
                mesh, ta, tb, opt.adjacent_depth,
                [&](const Vec3& x, const Vec3& bx, const Vec3& y, const Vec3& by, double w) {
                    const Complex wg = w * green_kernel_s(s, x, y);
                    const Complex wgz = wg * zz * nn;
                    for (int ia = 0; ia < 3; ++ia)
                        for (int ib = 0; ib < 3; ++ib)
                            blk(ia, ib) += wg * cc(ia, ib) + wgz * bx[size_t(ia)] * by[size_t(ib)];
                });
            // the Duffy self rule is not symmetric in the (x, y) roles;
            // symmetrize so the Galerkin matrix is exactly symmetric
            if (tb == ta) blk = 0.5 * (blk + blk.transpose()).eval();
            for (int ia = 0; ia < 3; ++ia)
                for (int ib = 0; ib < 3; ++ib) {
                    const int ga = mesh.triangles[size_t(ta)][size_t(ia)];
                    const int gb = mesh.triangles[size_t(tb)][size_t(ib)];
                    a(ga, gb) -= blk(ia, ib);
                    if (tb != ta) a(gb, ga) -= blk(ia, ib);
                }
        }
    }
    BoundaryOperator op;
    op.matrix = std::move(a);
    op.row_space = op.col_space = Space::P1;
    op.z = z;
    op.kind = OperatorKind::D;
    return op;
}

VectorR p0_mass(const SurfaceMesh& mesh) {
    VectorR m(mesh.n_p0());
    for (int t = 0; t < mesh.n_p0(); ++t) m[t] = mesh.area[size_t(t)];
    return m;
}

MatrixR p1_mass(const SurfaceMesh& mesh) {
    MatrixR m = MatrixR::Zero(mesh.n_p1(), mesh.n_p1());
    const auto& bary = SurfaceMesh::quad_bary();
    const auto& wf = rule_weights();
    for (int t = 0; t < mesh.n_p0(); ++t) {
        const auto& tri = mesh.triangles[size_t(t)];
        for (int q = 0; q < SurfaceMesh::quad_order; ++q) {
            const double w = wf[size_t(q)] * mesh.area[size_t(t)];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    m(tri[size_t(i)], tri[size_t(j)]) += w * bary[size_t(q)][size_t(i)] * bary[size_t(q)][size_t(j)];
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Potentials and traces

namespace {

void check_distance(const SurfaceMesh& mesh, const std::vector<Vec3>& points) {
    for (const auto& x : points) {
        const double d = mesh.distance(x);
        if (d < 0.45 * mesh.mean_edge)
            throw PointTooClose("evaluation point within half a mesh size of the surface");
    }
}

// Near-singular evaluation: subdivide a panel while the target sits closer
// than its own extent.  F(y, bary, w) accumulates quadrature points.
template <class F>
void for_each_point_near(const Panel& pa, const Vec3& x, int depth, const F& f) {
    const double diam = 2.0 * std::sqrt(pa.area);
    const double dist = std::min({(x - pa.p[0]).norm(), (x - pa.p[1]).norm(),
                                  (x - pa.p[2]).norm(),
                                  (x - (pa.p[0] + pa.p[1] + pa.p[2]) / 3.0).norm()});
    if (depth <= 0 || dist > diam) {
        const auto& bary = SurfaceMesh::quad_bary();
        const auto& wf = rule_weights();
        for (int q = 0; q < 7; ++q) {
            const Vec3& b = bary[size_t(q)];
            const Vec3 y = b[0] * pa.p[0] + b[1] * pa.p[1] + b[2] * pa.p[2];
            const Vec3 by = b[0] * pa.b[0] + b[1] * pa.b[1] + b[2] * pa.b[2];
            f(y, by, wf[size_t(q)] * pa.area);
        }
        return;
    }
    for (const auto& child : split(pa)) for_each_point_near(child, x, depth - 1, f);
}

constexpr int near_eval_depth = 3;

} // namespace

VectorC evaluate_layer(const SurfaceMesh& mesh, const SpectralParam& z,
                       const VectorC& density, LayerKind kind,
                       const std::vector<Vec3>& points) {
    check_distance(mesh, points);
    const Complex s = z.s();
    std::vector<Panel> panels;
    panels.reserve(size_t(mesh.n_p0()));
    for (int t = 0; t < mesh.n_p0(); ++t) panels.push_back(root_panel(mesh, t));
    VectorC out = VectorC::Zero(Eigen::Index(points.size()));
    for (size_t ip = 0; ip < points.size(); ++ip) {
        const Vec3& x = points[ip];
        Complex acc = 0.0;
        for (int t = 0; t < mesh.n_p0(); ++t) {
            const auto& tri = mesh.triangles[size_t(t)];
            const Vec3& nu = mesh.normal[size_t(t)];
            for_each_point_near(panels[size_t(t)], x, near_eval_depth,
                                [&](const Vec3& y, const Vec3& by, double w) {
                                    if (kind == LayerKind::SL) {
                                        acc += w * green_kernel_s(s, x, y) * density[t];
                                    } else {
                                        const Complex dens = by[0] * density[tri[0]] +
                                                             by[1] * density[tri[1]] +
                                                             by[2] * density[tri[2]];
                                        acc += w * dl_kernel(s, x, y, nu) * dens;
                                    }
                                });
        }
        out[Eigen::Index(ip)] = acc;
    }
    return out;
}

std::vector<Eigen::Vector3cd> evaluate_layer_gradient(const SurfaceMesh& mesh,
                                                      const SpectralParam& z,
                                                      const VectorC& density, LayerKind kind,
                                                      const std::vector<Vec3>& points) {
    check_distance(mesh, points);
    const Complex s = z.s();
    std::vector<Panel> panels;
    panels.reserve(size_t(mesh.n_p0()));
    for (int t = 0; t < mesh.n_p0(); ++t) panels.push_back(root_panel(mesh, t));
    std::vector<Eigen::Vector3cd> out(points.size(), Eigen::Vector3cd::Zero());
    for (size_t ip = 0; ip < points.size(); ++ip) {
        const Vec3& x = points[ip];
        Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
        for (int t = 0; t < mesh.n_p0(); ++t) {
            const auto& tri = mesh.triangles[size_t(t)];
            const Vec3& nu = mesh.normal[size_t(t)];
            for_each_point_near(panels[size_t(t)], x, near_eval_depth,
                                [&](const Vec3& y, const Vec3& by, double w) {
                                    if (kind == LayerKind::SL) {
                                        acc += w * density[t] * green_kernel_grad(s, x, y);
                                    } else {
                                        const Complex dens = by[0] * density[tri[0]] +
                                                             by[1] * density[tri[1]] +
                                                             by[2] * density[tri[2]];
                                        acc += w * dens * dl_kernel_grad(s, x, y, nu);
                                    }
                                });
        }
        out[ip] = acc;
    }
    return out;
}

VectorC trace_moments(const SurfaceMesh& mesh, Space space,
                      const std::function<Complex(const Vec3&, const Vec3&)>& f) {
    const auto& bary = SurfaceMesh::quad_bary();
    if (space == Space::P0) {
        VectorC m = VectorC::Zero(mesh.n_p0());
        for (int t = 0; t < mesh.n_p0(); ++t)
            for (int q = 0; q < SurfaceMesh::quad_order; ++q)
                m[t] += mesh.quad_weight[size_t(t)][size_t(q)] *
                        f(mesh.quad_point[size_t(t)][size_t(q)], mesh.normal[size_t(t)]);
        return m;
    }
    VectorC m = VectorC::Zero(mesh.n_p1());
    for (int t = 0; t < mesh.n_p0(); ++t) {
        const auto& tri = mesh.triangles[size_t(t)];
        for (int q = 0; q < SurfaceMesh::quad_order; ++q) {
            const Complex fv = f(mesh.quad_point[size_t(t)][size_t(q)], mesh.normal[size_t(t)]);
            const double w = mesh.quad_weight[size_t(t)][size_t(q)];
            for (int i = 0; i < 3; ++i)
                m[tri[size_t(i)]] += w * bary[size_t(q)][size_t(i)] * fv;
        }
    }
    return m;
}

VectorC far_field_row(const SurfaceMesh& mesh, double lambda, LimitSide side,
                      const Vec3& xi, LayerKind kind) {
    if (!(lambda < 0.0)) throw InvalidSpectralParam("far_field_row requires lambda < 0");
    (void)side; // the trace of the plane wave itself does not depend on the side
    const double k = std::sqrt(-lambda);
    if (kind == LayerKind::SL) {
        return trace_moments(mesh, Space::P0, [&](const Vec3& y, const Vec3&) {
            return std::exp(iu * k * xi.dot(y));
        });
    }
    return trace_moments(mesh, Space::P1, [&](const Vec3& y, const Vec3& nu) {
        return iu * k * xi.dot(nu) * std::exp(iu * k * xi.dot(y));
    });
}

} // namespace kscat
