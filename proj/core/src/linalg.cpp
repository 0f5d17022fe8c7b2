#include "kscat/linalg.hpp"

#include <cmath>

namespace kscat {

namespace {

double norm1(const MatrixC& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

} // namespace

double inverse_norm1_estimate(const Eigen::PartialPivLU<MatrixC>& lu) {
    // Power iteration on |inv(A)| in the 1-norm (Hager's estimator, complex
    // variant: sign vector replaced by unit-modulus phases).
    const Eigen::Index n = lu.rows();
    if (n == 0) return 0.0;
    VectorC x = VectorC::Constant(n, Complex(1.0 / double(n), 0.0));
    double est = 0.0;
    for (int iter = 0; iter < 6; ++iter) {
        VectorC y = lu.solve(x);
        double ny = y.cwiseAbs().sum();
        if (!std::isfinite(ny)) return std::numeric_limits<double>::infinity();
        if (ny <= est && iter > 0) break;
        est = ny;
        VectorC xi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = std::abs(y[i]);
            xi[i] = (m > 0.0) ? y[i] / m : Complex(1.0, 0.0);
        }
        VectorC zv = lu.adjoint().solve(xi);
        Eigen::Index jmax = 0;
        zv.cwiseAbs().maxCoeff(&jmax);
        VectorC e = VectorC::Zero(n);
        e[jmax] = 1.0;
        x = e;
    }
    return est;
}

GatedLU::GatedLU(const MatrixC& a) {
    lu_ = std::make_shared<Eigen::PartialPivLU<MatrixC>>(a);
    const double na = norm1(a);
    // A pivot of exactly zero means structurally singular; report infinity.
    double min_pivot = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        min_pivot = std::min(min_pivot, std::abs(lu_->matrixLU()(i, i)));
    if (min_pivot == 0.0 || !std::isfinite(na)) {
        cond_ = std::numeric_limits<double>::infinity();
        return;
    }
    cond_ = na * inverse_norm1_estimate(*lu_);
}

Eigen::Index GatedLU::rows() const { return lu_ ? lu_->rows() : 0; }

VectorC GatedLU::solve(const VectorC& b) const { return lu_->solve(b); }
MatrixC GatedLU::solve(const MatrixC& b) const { return lu_->solve(b); }
MatrixC GatedLU::inverse() const { return lu_->inverse(); }

double cond1_estimate(const MatrixC& a) { return GatedLU(a).cond(); }

} // namespace kscat
