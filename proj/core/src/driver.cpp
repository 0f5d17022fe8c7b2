#include "kscat/driver.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kscat/errors.hpp"
#include "kscat/operator_core.hpp"
#include "kscat/oracle.hpp"
#include "kscat/smatrix.hpp"

namespace kscat {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// small utilities

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

SurfaceMesh build_mesh(const RunConfig& c, int level) {
    if (c.shape == "sphere") return make_sphere(c.radius, level);
    return make_ellipsoid(c.semi_axes[0], c.semi_axes[1], c.semi_axes[2], level);
}

bool radial_configuration(const RunConfig& c) {
    if (c.shape != "sphere") return false;
    if (!c.potential.empty() && c.potential.center.norm() > 1e-12) return false;
    return c.model.vertex_strength.empty();
}

struct LinearFit {
    double slope;
};

// least-squares slope of y against x
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return {(n * sxy - sx * sy) / (n * sxx - sx * sx)};
}

} // namespace

// ---------------------------------------------------------------------------
// jump-relation defects (diagnostics shared by convergence mode and tests)

JumpReport jump_report(const SurfaceMesh& mesh, const VolumeGrid& grid,
                       const SpectralParam& z, double cond_limit) {
    LSFactorization ls;
    if (!grid.empty()) ls = LSFactorization(grid, z, cond_limit);

    const double h = 0.5 * 0.96 * mesh.mean_edge;
    const int nt = mesh.n_p0();
    const VectorR w = p0_mass(mesh);
    auto wnorm = [&](const VectorC& x) {
        return std::sqrt(x.cwiseAbs2().cwiseProduct(w).sum());
    };

    std::vector<Vec3> pts;
    pts.reserve(size_t(nt) * 8);
    for (int t = 0; t < nt; ++t) {
        const Vec3& nu = mesh.normal[size_t(t)];
        const Vec3& x0 = mesh.centroid[size_t(t)];
        for (double sgn : {-1.0, 1.0})
            for (int m = 1; m <= 4; ++m) pts.push_back(x0 + sgn * m * h * nu);
    }

    auto jumps = [&](LayerKind kind, bool dressed) {
        const int nd = (kind == LayerKind::SL) ? mesh.n_p0() : mesh.n_p1();
        const VectorC density = VectorC::Ones(nd);
        std::vector<Eigen::Vector3cd> gr;
        VectorC vals;
        if (dressed && !grid.empty()) {
            gr = dressed_layer_potential_gradient(mesh, grid, ls, density, kind, pts);
            vals = dressed_layer_potential(mesh, grid, ls, density, kind, pts);
        } else {
            gr = evaluate_layer_gradient(mesh, z, density, kind, pts);
            vals = evaluate_layer(mesh, z, density, kind, pts);
        }
        VectorC j0(nt), j1(nt);
        for (int t = 0; t < nt; ++t) {
            const Vec3& nu = mesh.normal[size_t(t)];
            auto nd1 = [&](int idx) { return gr[size_t(idx)].dot(nu.cast<Complex>()); };
            auto extrap = [](Complex a, Complex b, Complex c, Complex d) {
                return 4.0 * a - 6.0 * b + 4.0 * c - d; // cubic toward the surface
            };
            const Complex g0_in = extrap(vals[8 * t], vals[8 * t + 1], vals[8 * t + 2], vals[8 * t + 3]);
            const Complex g0_ex = extrap(vals[8 * t + 4], vals[8 * t + 5], vals[8 * t + 6], vals[8 * t + 7]);
            const Complex g1_in = extrap(nd1(8 * t), nd1(8 * t + 1), nd1(8 * t + 2), nd1(8 * t + 3));
            const Complex g1_ex = extrap(nd1(8 * t + 4), nd1(8 * t + 5), nd1(8 * t + 6), nd1(8 * t + 7));
            j0[t] = g0_in - g0_ex;
            j1[t] = g1_in - g1_ex;
        }
        return std::make_pair(j0, j1);
    };

    JumpReport rep{};
    const VectorC ones = VectorC::Ones(nt);
    {
        auto [j0, j1] = jumps(LayerKind::SL, false);
        rep.sl_gamma1 = wnorm(j1 - ones) / wnorm(ones);
        (void)j0;
    }
    {
        auto [j0, j1] = jumps(LayerKind::DL, false);
        rep.dl_gamma0 = wnorm(j0 + ones) / wnorm(ones);
        (void)j1;
    }
    if (!grid.empty()) {
        auto [j0, j1] = jumps(LayerKind::SL, true);
        rep.slv_gamma1 = wnorm(j1 - ones) / wnorm(ones);
        (void)j0;
        auto [k0, k1] = jumps(LayerKind::DL, true);
        rep.dlv_gamma0 = wnorm(k0 + ones) / wnorm(ones);
        rep.dlv_gamma1 = wnorm(k1) / wnorm(ones);
    } else {
        rep.slv_gamma1 = rep.sl_gamma1;
        auto [k0, k1] = jumps(LayerKind::DL, false);
        rep.dlv_gamma0 = wnorm(k0 + ones) / wnorm(ones);
        rep.dlv_gamma1 = wnorm(k1) / wnorm(ones);
    }
    return rep;
}

namespace {

// ---------------------------------------------------------------------------
// abstract-check

struct AbstractResiduals {
    std::map<std::string, double> max_residual;
    void absorb(const std::string& key, double v) {
        auto& slot = max_residual[key];
        slot = std::max(slot, v);
    }
};

double rel(double num, double den) { return num / std::max(den, 1e-300); }

AbstractResiduals abstract_check_suite(std::uint64_t seed, int n_systems, int n_max,
                                       double cond_limit) {
    SystemSampler sampler(seed);
    AbstractResiduals res;
    const std::array<Complex, 3> zs = {Complex(1.7, 0.31), Complex(-0.4, 1.1),
                                       Complex(2.3, -0.77)};
    std::mt19937_64 dims(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<int> dn(4, n_max), dm(1, 4);

    for (int it = 0; it < n_systems; ++it) {
        const int n = dn(dims), m1 = dm(dims), m2 = dm(dims);
        KreinSystem sys = sampler.sample(n, m1, m2, true);

        std::array<MatrixC, 3> rb, lam;
        std::array<ResolventFamily, 3> fam;
        for (size_t i = 0; i < 3; ++i) {
            fam[i] = free_resolvent(sys, zs[i], cond_limit);
            lam[i] = lambda_direct(sys, zs[i], cond_limit);
            rb[i] = krein_resolvent(sys, zs[i], cond_limit);
        }

        // (PS1)  Lambda_zbar = Lambda_z^*
        for (size_t i = 0; i < 3; ++i) {
            const MatrixC lb = lambda_direct(sys, std::conj(zs[i]), cond_limit);
            res.absorb("ps1", rel((lb - lam[i].adjoint()).norm(), lam[i].norm()));
        }
        // (PS2) pairwise
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                const Complex z = zs[j], w = zs[i];
                ResolventFamily fw_bar = free_resolvent(sys, std::conj(w), cond_limit);
                const MatrixC lhs = lam[i] - lam[j];
                const MatrixC rhs = (z - w) * lam[i] * fw_bar.G.adjoint() * fam[j].G * lam[j];
                res.absorb("ps2", rel((lhs - rhs).norm(), lam[i].norm() + lam[j].norm()));
            }
        // pseudo-resolvent identity + adjoint symmetry
        for (size_t i = 0; i < 3; ++i) {
            const MatrixC rbb = krein_resolvent(sys, std::conj(zs[i]), cond_limit);
            res.absorb("resolvent_adjoint", rel((rb[i].adjoint() - rbb).norm(), rb[i].norm()));
            for (size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                const MatrixC lhs = rb[j] - rb[i];
                const MatrixC rhs = (zs[i] - zs[j]) * rb[j] * rb[i];
                res.absorb("pseudo_resolvent", rel((lhs - rhs).norm(), rb[i].norm()));
            }
        }
        // recovered operator: Hermitian, z-independent
        std::array<MatrixC, 3> ab;
        for (size_t i = 0; i < 3; ++i) ab[i] = recovered_operator(sys, zs[i], cond_limit);
        for (size_t i = 0; i < 3; ++i)
            res.absorb("hermitian_ab", rel((ab[i] - ab[i].adjoint()).norm(), ab[i].norm()));
        for (size_t i = 1; i < 3; ++i)
            res.absorb("z_independence", rel((ab[i] - ab[0]).norm(), ab[0].norm()));
        // block equivalence: krein == alt, Lambda blocks == direct
        for (size_t i = 0; i < 3; ++i) {
            const MatrixC alt = alt_resolvent(sys, zs[i], cond_limit);
            res.absorb("alt_equiv", rel((alt - rb[i]).norm(), rb[i].norm()));
            const LambdaBlocks bl = schur_blocks(sys, zs[i], cond_limit);
            res.absorb("schur_blocks", rel((bl.Lambda - lam[i]).norm(), lam[i].norm()));
        }
        // Green identity, boundary condition, additive representation
        const BoundaryResiduals br = rho_and_boundary_check(sys, zs[0], cond_limit);
        res.absorb("green_identity", br.green_identity);
        res.absorb("boundary_condition", br.boundary_condition);
        res.absorb("additive_form", br.additive_form);
    }
    return res;
}

// ---------------------------------------------------------------------------
// scattering pipeline

struct Pipeline {
    // ModelSystem keeps pointers into the mesh and the grid; hold them behind
    // stable addresses so the pipeline can be moved around
    std::unique_ptr<SurfaceMesh> mesh;
    std::unique_ptr<VolumeGrid> grid;
    DirectionSet dirs;
    std::unique_ptr<ModelSystem> msys;
    ScatteringMatrix sm;
    bool radial = false;
};

Pipeline build_scattering(const RunConfig& c) {
    Pipeline p;
    p.mesh = std::make_unique<SurfaceMesh>(build_mesh(c, c.level));
    p.grid = std::make_unique<VolumeGrid>(make_volume_grid(c.potential, c.h_vol, c.cell_cap));
    p.dirs = direction_quadrature(c.n_polar);
    const SpectralParam zp = SpectralParam::boundary(c.lambda, LimitSide::plus);
    p.msys = std::make_unique<ModelSystem>(*p.mesh, *p.grid, c.model, zp, c.cond_limit);
    p.sm = smatrix_assemble(*p.msys, p.dirs);
    p.radial = radial_configuration(c);
    return p;
}

void write_smatrix_csv(const std::string& path, const ScatteringMatrix& sm) {
    std::ostringstream os;
    os << "i,j,re,im\n";
    os.precision(17);
    for (int i = 0; i < sm.kernel.rows(); ++i)
        for (int j = 0; j < sm.kernel.cols(); ++j)
            os << i << "," << j << "," << sm.kernel(i, j).real() << ","
               << sm.kernel(i, j).imag() << "\n";
    write_text(path, os.str());
}

void write_directions_csv(const std::string& path, const DirectionSet& d) {
    std::ostringstream os;
    os << "i,x,y,z,weight\n";
    os.precision(17);
    for (int i = 0; i < d.size(); ++i)
        os << i << "," << d.directions[size_t(i)][0] << "," << d.directions[size_t(i)][1]
           << "," << d.directions[size_t(i)][2] << "," << d.weights[size_t(i)] << "\n";
    write_text(path, os.str());
}

json base_summary(const RunConfig& c) {
    json j;
    j["format_version"] = "1";
    j["mode"] = mode_name(c.mode);
    j["seed"] = c.seed;
    return j;
}

} // namespace

// ---------------------------------------------------------------------------

RunResult run(const RunConfig& config) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.out_dir);
    auto opath = [&](const std::string& f) { return (fs::path(config.out_dir) / f).string(); };

    RunResult rr;
    json summary = base_summary(config);

    try {
        switch (config.mode) {
            case RunMode::abstract_check: {
                const AbstractResiduals res = abstract_check_suite(
                    config.seed, config.n_systems, config.n_max, config.cond_limit);
                std::ostringstream table;
                table << "abstract-check: " << config.n_systems
                      << " random systems (seed " << config.seed << ")\n";
                double worst = 0.0;
                json jr;
                for (const auto& [key, val] : res.max_residual) {
                    table << "  " << key << std::string(key.size() < 20 ? 20 - key.size() : 1, ' ')
                          << fmt(val) << "\n";
                    jr[key] = val;
                    worst = std::max(worst, val);
                }
                const bool ok = worst <= 1e-8;
                table << (ok ? "PASS" : "FAIL") << " (worst " << fmt(worst)
                      << ", gate 1e-08)\n";
                summary["residuals"] = jr;
                summary["worst_residual"] = worst;
                summary["n_systems"] = config.n_systems;
                rr.message = table.str();
                rr.exit_code = ok ? 0 : 1;
                break;
            }
            case RunMode::smatrix:
            case RunMode::cross_section:
            case RunMode::oracle_compare: {
                Pipeline p = build_scattering(config);
                const double k = p.sm.k;
                summary["lambda"] = config.lambda;
                summary["k"] = k;
                summary["level"] = config.level;
                summary["n_polar"] = config.n_polar;
                summary["n_cells"] = p.grid->size();
                summary["convention"] = p.sm.convention;
                summary["unitarity_defect"] = p.sm.unitarity_defect();
                summary["reciprocity_defect"] = p.sm.reciprocity_defect();
                json conds;
                if (!p.grid->empty()) conds["lippmann_schwinger"] = p.msys->ls().cond();
                if (!config.model.is_none()) conds["lambda_hat"] = p.msys->lambda_hat_cond();
                summary["conditions"] = conds;

                write_smatrix_csv(opath("smatrix.csv"), p.sm);
                write_directions_csv(opath("directions.csv"), p.dirs);

                const int lmax = std::min(config.effective_ell_max(), config.n_polar - 1);
                std::vector<Complex> sl;
                if (p.radial) {
                    sl = phase_shifts(p.sm, lmax);
                    json jps = json::array();
                    for (int l = 0; l <= lmax; ++l)
                        jps.push_back({{"l", l},
                                       {"re", sl[size_t(l)].real()},
                                       {"im", sl[size_t(l)].imag()},
                                       {"abs", std::abs(sl[size_t(l)])},
                                       {"phase", std::arg(sl[size_t(l)])}});
                    summary["phase_shifts"] = jps;
                }
                summary["radial"] = p.radial;

                const AmplitudeTable at = cross_sections(p.sm);
                summary["sigma_total_integrated"] = at.sigma_integrated;
                summary["sigma_total_optical"] = at.sigma_optical;

                std::ostringstream msg;
                msg << mode_name(config.mode) << ": lambda " << config.lambda << ", k " << k
                    << ", unitarity defect " << fmt(p.sm.unitarity_defect())
                    << ", reciprocity defect " << fmt(p.sm.reciprocity_defect()) << "\n";

                if (config.mode == RunMode::cross_section) {
                    std::ostringstream os;
                    os << "i,j,costheta,re_f,im_f,dsigma\n";
                    os.precision(17);
                    for (int i = 0; i < p.dirs.size(); ++i)
                        for (int j = 0; j < p.dirs.size(); ++j)
                            os << i << "," << j << ","
                               << p.dirs.directions[size_t(i)].dot(p.dirs.directions[size_t(j)])
                               << "," << at.f(i, j).real() << "," << at.f(i, j).imag() << ","
                               << std::norm(at.f(i, j)) << "\n";
                    write_text(opath("amplitude.csv"), os.str());
                    msg << "sigma_total: integrated " << fmt(at.sigma_integrated)
                        << ", optical " << fmt(at.sigma_optical) << "\n";
                }

                if (config.mode == RunMode::oracle_compare) {
                    if (!p.radial)
                        throw NotRadial("oracle-compare needs a radial configuration");
                    const auto so = oracle::partial_wave_model(config.radius, config.model,
                                                               config.potential, config.lambda,
                                                               lmax);
                    std::ostringstream os;
                    os << "l,re_bem,im_bem,re_oracle,im_oracle,abs_err\n";
                    os.precision(17);
                    double max_err = 0.0;
                    for (int l = 0; l <= lmax; ++l) {
                        const double err = std::abs(sl[size_t(l)] - so[size_t(l)]);
                        max_err = std::max(max_err, err);
                        os << l << "," << sl[size_t(l)].real() << "," << sl[size_t(l)].imag()
                           << "," << so[size_t(l)].real() << "," << so[size_t(l)].imag() << ","
                           << err << "\n";
                    }
                    write_text(opath("oracle_compare.csv"), os.str());
                    summary["oracle_max_abs_err"] = max_err;
                    msg << "oracle comparison: max |S_l - oracle| " << fmt(max_err) << "\n";
                }
                rr.message = msg.str();
                break;
            }
            case RunMode::convergence: {
                return convergence_study(config);
            }
        }
    } catch (const SingularLS& e) {
        rr.exit_code = 2;
        rr.message = std::string(e.what()) + "\n";
        summary["error"] = e.what();
    } catch (const SingularInterfaceOperator& e) {
        rr.exit_code = 2;
        rr.message = std::string(e.what()) + "\n";
        summary["error"] = e.what();
    }

    rr.summary_json = summary.dump(2) + "\n";
    write_text(opath("summary.json"), rr.summary_json);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    write_text(opath("timing.txt"), "wall_clock_seconds " + fmt(secs) + "\n");
    return rr;
}

RunResult convergence_study(const RunConfig& config) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(config.out_dir);
    auto opath = [&](const std::string& f) { return (fs::path(config.out_dir) / f).string(); };

    if (config.levels.size() < 3)
        throw ConfigError("convergence.levels", "need at least 3 refinement levels");

    RunResult rr;
    json summary = base_summary(config);
    const SpectralParam z1 = SpectralParam::interior(Complex(1.0, 0.0));

    std::vector<double> hs, j_sl, j_dl, bc_res, s0_err;
    std::ostringstream csv;
    csv << "level,h,jump_sl_gamma1,jump_dl_gamma0,bc_residual,s0_error\n";
    csv.precision(17);

    for (int level : config.levels) {
        SurfaceMesh mesh = build_mesh(config, level);
        VolumeGrid grid = make_volume_grid(config.potential, config.h_vol, config.cell_cap);
        const JumpReport jr = jump_report(mesh, grid, z1, config.cond_limit);
        hs.push_back(mesh.mean_edge);
        j_sl.push_back(jr.slv_gamma1);
        j_dl.push_back(jr.dlv_gamma0);

        double bc = std::numeric_limits<double>::quiet_NaN();
        if (!config.model.is_none()) {
            ModelSystem msys(mesh, grid, config.model, z1, config.cond_limit);
            VolumeSource src;
            src.points.push_back({Vec3(0.0, 0.0, 1.5 * config.radius), Complex(1.0, 0.0)});
            bc = msys.boundary_condition_residual(src);
        }
        bc_res.push_back(bc);

        double s0 = std::numeric_limits<double>::quiet_NaN();
        if (radial_configuration(config) && !config.model.is_none()) {
            const SpectralParam zp = SpectralParam::boundary(config.lambda, LimitSide::plus);
            ModelSystem msys(mesh, grid, config.model, zp, config.cond_limit);
            DirectionSet dirs = direction_quadrature(config.n_polar);
            ScatteringMatrix sm = smatrix_assemble(msys, dirs);
            const auto sl = phase_shifts(sm, 0);
            const auto so = oracle::partial_wave_model(config.radius, config.model,
                                                       config.potential, config.lambda, 0);
            s0 = std::abs(sl[0] - so[0]);
        }
        s0_err.push_back(s0);
        csv << level << "," << mesh.mean_edge << "," << jr.slv_gamma1 << "," << jr.dlv_gamma0
            << "," << bc << "," << s0 << "\n";
    }
    write_text(opath("convergence.csv"), csv.str());

    auto order_of = [&](const std::vector<double>& err) {
        std::vector<double> lx, ly;
        for (size_t i = 0; i < err.size(); ++i) {
            if (!std::isfinite(err[i]) || err[i] <= 0.0) continue;
            lx.push_back(std::log(hs[i]));
            ly.push_back(std::log(err[i]));
        }
        if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        return fit_line(lx, ly).slope;
    };

    json orders;
    orders["jump_sl_gamma1"] = order_of(j_sl);
    orders["jump_dl_gamma0"] = order_of(j_dl);
    if (!config.model.is_none()) orders["bc_residual"] = order_of(bc_res);
    if (radial_configuration(config) && !config.model.is_none())
        orders["s0_error"] = order_of(s0_err);
    summary["observed_orders"] = orders;

    std::ostringstream msg;
    msg << "convergence: observed orders";
    for (auto it = orders.begin(); it != orders.end(); ++it)
        msg << " " << it.key() << "=" << it.value().dump();
    msg << "\n";
    rr.message = msg.str();

    rr.summary_json = summary.dump(2) + "\n";
    write_text(opath("summary.json"), rr.summary_json);
    const auto t1 = std::chrono::steady_clock::now();
    write_text(opath("timing.txt"),
               "wall_clock_seconds " + fmt(std::chrono::duration<double>(t1 - t0).count()) + "\n");
    return rr;
}

} // namespace kscat
