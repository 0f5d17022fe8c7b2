#include "kscat/smatrix.hpp"

#include <cmath>

#include "kscat/errors.hpp"
#include "kscat/linalg.hpp"
#include "kscat/special.hpp"

namespace kscat {

namespace {

VectorC plane_wave_on_cells(const VolumeGrid& grid, double k, const Vec3& xi) {
    VectorC pw(grid.size());
    for (int c = 0; c < grid.size(); ++c)
        pw[c] = std::exp(iu * k * xi.dot(grid.centers[size_t(c)]));
    return pw;
}

VectorC boundary_moments(const ModelSystem& msys, const Vec3& xi) {
    if (msys.model().is_none()) return VectorC();
    return far_field_row(msys.mesh(), msys.z().lambda(), msys.z().side(), xi,
                         msys.model().layer_kind());
}

} // namespace

PairOutput lambda_plus_pair_apply(const ModelSystem& msys, const Vec3& xi) {
    if (!msys.z().is_boundary() || msys.z().side() != LimitSide::plus)
        throw InvalidSpectralParam("pair apply needs the (lambda, +) boundary parameter");
    const double k = msys.z().k();
    const VolumeGrid& grid = msys.grid();
    const double vol = grid.cell_volume;

    PairOutput out;
    VectorC a = VectorC::Zero(grid.size());
    if (!grid.empty()) {
        const VectorC pw = plane_wave_on_cells(grid, k, xi);
        a = msys.ls().lambda_apply(pw);
    }
    if (msys.model().is_none()) {
        out.volume = a;
        out.boundary = VectorC();
        return out;
    }
    VectorC m = boundary_moments(msys, xi);
    if (!grid.empty() && msys.coupling().size() > 0)
        m += vol * (msys.coupling().transpose() * a);
    out.boundary = msys.lambda_hat_apply(m);
    out.volume = a;
    if (!grid.empty() && msys.coupling().size() > 0)
        out.volume += msys.ls().lambda_apply((msys.coupling() * out.boundary).eval());
    return out;
}

ScatteringMatrix smatrix_assemble(const ModelSystem& msys, const DirectionSet& dirs) {
    const double k = msys.z().k();
    const double lambda = msys.z().lambda();
    const int nd = dirs.size();
    const VolumeGrid& grid = msys.grid();
    const double vol = grid.cell_volume;
    const double prefac = -2.0 * pi * (k / 2.0) / std::pow(2.0 * pi, 3);

    // incident data per direction
    std::vector<VectorC> pw, mb;
    pw.resize(size_t(nd));
    mb.resize(size_t(nd));
    for (int j = 0; j < nd; ++j) {
        if (!grid.empty()) pw[size_t(j)] = plane_wave_on_cells(grid, k, dirs.directions[size_t(j)]);
        if (!msys.model().is_none()) mb[size_t(j)] = boundary_moments(msys, dirs.directions[size_t(j)]);
    }

    ScatteringMatrix sm;
    sm.lambda = lambda;
    sm.k = k;
    sm.directions = dirs;
    sm.kernel = MatrixC::Zero(nd, nd);

    for (int j = 0; j < nd; ++j) {
        PairOutput po = lambda_plus_pair_apply(msys, dirs.directions[size_t(j)]);
        for (int i = 0; i < nd; ++i) {
            Complex acc = 0.0;
            if (!grid.empty() && po.volume.size() > 0)
                acc += vol * pw[size_t(i)].dot(po.volume);
            if (po.boundary.size() > 0) acc += mb[size_t(i)].dot(po.boundary);
            sm.kernel(i, j) = prefac * iu * acc;
        }
    }
    return sm;
}

Complex smatrix_kernel_entry(const ModelSystem& msys, const Vec3& xi_out, const Vec3& xi_in) {
    const double k = msys.z().k();
    const VolumeGrid& grid = msys.grid();
    const double vol = grid.cell_volume;
    const double prefac = -2.0 * pi * (k / 2.0) / std::pow(2.0 * pi, 3);
    PairOutput po = lambda_plus_pair_apply(msys, xi_in);
    Complex acc = 0.0;
    if (!grid.empty() && po.volume.size() > 0) {
        const VectorC pwo = plane_wave_on_cells(grid, k, xi_out);
        acc += vol * pwo.dot(po.volume);
    }
    if (po.boundary.size() > 0) {
        const VectorC mo = boundary_moments(msys, xi_out);
        acc += mo.dot(po.boundary);
    }
    return prefac * iu * acc;
}

MatrixC ScatteringMatrix::op_matrix() const {
    const int n = directions.size();
    MatrixC s = MatrixC::Identity(n, n);
    for (int j = 0; j < n; ++j) s.col(j) += kernel.col(j) * directions.weights[size_t(j)];
    return s;
}

double ScatteringMatrix::unitarity_defect() const {
    const int n = directions.size();
    const MatrixC s = op_matrix();
    MatrixR w = MatrixR::Zero(n, n);
    for (int i = 0; i < n; ++i) w(i, i) = directions.weights[size_t(i)];
    const MatrixC d = s.adjoint() * w.cast<Complex>() * s - w.cast<Complex>();
    Eigen::JacobiSVD<MatrixC> svd_d(d);
    Eigen::JacobiSVD<MatrixC> svd_w(w.cast<Complex>());
    return svd_d.singularValues()(0) / svd_w.singularValues()(0);
}

double ScatteringMatrix::reciprocity_defect() const {
    const int n = directions.size();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int ia = directions.antipode[size_t(i)];
            const int ja = directions.antipode[size_t(j)];
            num = std::max(num, std::abs(kernel(i, j) - kernel(ja, ia)));
            den = std::max(den, std::abs(kernel(i, j)));
        }
    return num / std::max(den, 1e-300);
}

std::vector<Complex> phase_shifts(const ScatteringMatrix& sm, int ell_max) {
    const int n = sm.directions.size();
    const auto& w = sm.directions.weights;
    const auto& xi = sm.directions.directions;

    // the quadrature integrates P_l P_l' exactly only up to l + l' <= 2 n_polar - 1
    const int n_polar = int(std::round(std::sqrt(n / 2.0)));
    if (ell_max > n_polar - 1)
        throw Error("phase_shifts: ell_max needs n_polar >= ell_max + 1");
    const int l_rec = n_polar - 1;
    std::vector<Complex> proj(size_t(l_rec) + 1, Complex(0.0, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double t = std::clamp(xi[size_t(i)].dot(xi[size_t(j)]), -1.0, 1.0);
            const double ww = w[size_t(i)] * w[size_t(j)];
            for (int l = 0; l <= l_rec; ++l)
                proj[size_t(l)] += ww * legendre_p(l, t) * sm.kernel(i, j);
        }

    // radial-symmetry pre-check: rebuild the kernel from the projections
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double t = std::clamp(xi[size_t(i)].dot(xi[size_t(j)]), -1.0, 1.0);
            Complex rec = 0.0;
            for (int l = 0; l <= l_rec; ++l)
                rec += (2.0 * l + 1.0) / (4.0 * pi) * (proj[size_t(l)] / (4.0 * pi)) *
                       legendre_p(l, t);
            num += std::norm(sm.kernel(i, j) - rec);
            den += std::norm(sm.kernel(i, j));
        }
    if (den > 0.0 && std::sqrt(num / den) > 0.05)
        throw NotRadial("kernel is not a function of xi.xi' (defect " +
                        std::to_string(std::sqrt(num / den)) + ")");

    std::vector<Complex> out(size_t(ell_max) + 1);
    for (int l = 0; l <= ell_max; ++l)
        out[size_t(l)] = 1.0 + proj[size_t(l)] / (4.0 * pi);
    return out;
}

AmplitudeTable cross_sections(const ScatteringMatrix& sm) {
    const int n = sm.directions.size();
    AmplitudeTable at;
    at.f = (-2.0 * pi * iu / sm.k) * sm.kernel;
    at.dsigma = at.f.cwiseAbs2();
    at.sigma_by_direction.resize(n);
    at.sigma_optical_by_direction.resize(n);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += sm.directions.weights[size_t(i)] * std::norm(at.f(i, j));
        at.sigma_by_direction[j] = acc;
        at.sigma_optical_by_direction[j] = 4.0 * pi / sm.k * at.f(j, j).imag();
    }
    at.sigma_integrated = at.sigma_by_direction.mean();
    at.sigma_optical = at.sigma_optical_by_direction.mean();
    return at;
}

MuIndependenceReport mu_independence_check(const KreinSystem& sys, int eigen_index,
                                           double mu1, double mu2, double epsilon) {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(sys.A);
    const VectorR evals = es.eigenvalues();
    const Eigen::Index n = sys.n();
    if (eigen_index < 0 || eigen_index >= n) throw Error("eigen index out of range");
    const double lambda = evals[eigen_index];

    // gather the (near-)degenerate block
    std::vector<Eigen::Index> block;
    const double scale = std::max(1.0, std::abs(evals[n - 1] - evals[0]));
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(evals[i] - lambda) < 1e-10 * scale) block.push_back(i);
    const int g = int(block.size());

    const MatrixC tau_adj = sys.tau().adjoint();

    auto pairing = [&](double mu) {
        // L rows: (mu - lambda) e_i^H R_mu tau^*
        MatrixC zmA = -sys.A + Complex(mu, 0.0) * MatrixC::Identity(n, n);
        GatedLU lu(zmA);
        lu.require<SingularResolvent>(default_cond_limit, "mu inside the spectrum");
        MatrixC rt = lu.solve(tau_adj);
        MatrixC L(g, tau_adj.cols());
        for (int r = 0; r < g; ++r)
            L.row(r) = (mu - lambda) * (es.eigenvectors().col(block[size_t(r)]).adjoint() * rt);
        return L;
    };

    const MatrixC l1 = pairing(mu1);
    const MatrixC l2 = pairing(mu2);

    // shared regularized Lambda factor at lambda + i epsilon
    const Complex z0(lambda, epsilon);
    const MatrixC lam = lambda_direct(sys, z0);

    const MatrixC s1 = MatrixC::Identity(g, g) - 2.0 * pi * iu * (l1 * lam * l1.adjoint());
    const MatrixC s2 = MatrixC::Identity(g, g) - 2.0 * pi * iu * (l2 * lam * l2.adjoint());

    MuIndependenceReport rep{};
    rep.pairing_defect = (l1 - l2).norm() / std::max(l1.norm(), 1e-300);
    rep.smatrix_defect = (s1 - s2).norm() / std::max(s1.norm(), 1e-300);
    return rep;
}

} // namespace kscat
