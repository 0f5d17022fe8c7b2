#include "kscat/operator_core.hpp"

#include "kscat/errors.hpp"
#include "kscat/linalg.hpp"

namespace kscat {

namespace {

double rel(double num, double den) { return num / std::max(den, 1e-300); }

MatrixC couple_b(const KreinSystem& s) {
    // diag(B1, B2): (m1+m2p) x (m1+m2)
    MatrixC b = MatrixC::Zero(s.m1() + s.m2p(), s.m1() + s.m2());
    b.topLeftCorner(s.m1(), s.m1()) = s.B1;
    b.bottomRightCorner(s.m2p(), s.m2()) = s.B2;
    return b;
}

MatrixC one_oplus_b0(const KreinSystem& s) {
    MatrixC b = MatrixC::Zero(s.m1() + s.m2p(), s.m1() + s.m2());
    b.topLeftCorner(s.m1(), s.m1()).setIdentity();
    b.bottomRightCorner(s.m2p(), s.m2()) = s.B0;
    return b;
}

} // namespace

void KreinSystem::validate(double tol) const {
    if (A.rows() != A.cols()) throw InvalidSystem("A not square");
    if (tau1.cols() != n() || tau2.cols() != n()) throw InvalidSystem("trace map shape");
    if (B1.rows() != m1() || B1.cols() != m1()) throw InvalidSystem("B1 shape");
    if (B2.rows() != m2p() || B2.cols() != m2()) throw InvalidSystem("B2 shape");
    if (B0.cols() != m2()) throw InvalidSystem("B0 shape");
    const double sa = A.norm(), sb = B1.norm();
    if ((A - A.adjoint()).norm() > tol * std::max(1.0, sa))
        throw InvalidSystem("A not Hermitian");
    if ((B1 - B1.adjoint()).norm() > tol * std::max(1.0, sb))
        throw InvalidSystem("B1 not Hermitian");
    const MatrixC c = B0 * B2.adjoint() - B2 * B0.adjoint();
    if (c.norm() > tol * std::max(1.0, B0.norm() * B2.norm()))
        throw InvalidSystem("B0 B2^* != B2 B0^*");
}

MatrixC KreinSystem::tau() const {
    MatrixC t(m1() + m2(), n());
    t.topRows(m1()) = tau1;
    t.bottomRows(m2()) = tau2;
    return t;
}

ResolventFamily free_resolvent(const KreinSystem& sys, Complex z, double cond_limit) {
    const Eigen::Index n = sys.n();
    MatrixC zmA = -sys.A + z * MatrixC::Identity(n, n);
    GatedLU lu(zmA);
    lu.require<SingularResolvent>(cond_limit, "z too close to an eigenvalue of A");
    ResolventFamily f;
    f.z = z;
    f.R = lu.inverse();
    f.G = f.R * sys.tau().adjoint();
    f.G1 = f.G.leftCols(sys.m1());
    f.G2 = f.G.rightCols(sys.m2());
    return f;
}

MatrixC lambda_direct(const KreinSystem& sys, Complex z, double cond_limit) {
    if (sys.m2p() != sys.m2())
        throw InvalidSystem("M^B_z square inversion requires dim b*_{2,2} == dim b2");
    // membership in Z_B gates invertibility at zbar as well
    for (Complex w : {std::conj(z), z}) {
        ResolventFamily f = free_resolvent(sys, w, cond_limit);
        MatrixC m = one_oplus_b0(sys) - couple_b(sys) * (sys.tau() * f.G);
        GatedLU lu(m);
        if (w == z) {
            lu.require<SingularM>(cond_limit, "M^B_z not invertible (z outside Z_B)");
            return lu.solve(couple_b(sys));
        }
        lu.require<SingularM>(cond_limit, "M^B_zbar not invertible (z outside Z_B)");
    }
    throw SingularM("unreachable");
}

MatrixC krein_resolvent(const KreinSystem& sys, Complex z, double cond_limit) {
    ResolventFamily f = free_resolvent(sys, z, cond_limit);
    ResolventFamily fb = free_resolvent(sys, std::conj(z), cond_limit);
    MatrixC lam = lambda_direct(sys, z, cond_limit);
    MatrixC rb = f.R + f.G * lam * fb.G.adjoint();
    // Finite dimension voids the dense-kernel hypothesis on tau2; injectivity
    // of R^B_z is what the abstract argument actually uses, so check it.
    if (cond1_estimate(rb) > cond_limit)
        throw SingularResolvent("R^B_z numerically non-injective at this z");
    return rb;
}

LambdaBlocks schur_blocks(const KreinSystem& sys, Complex z, double cond_limit) {
    if (sys.m2p() != sys.m2())
        throw InvalidSystem("Schur blocks require dim b*_{2,2} == dim b2");
    LambdaBlocks out;
    const Eigen::Index m1 = sys.m1(), m2 = sys.m2();
    for (Complex w : {z, std::conj(z)}) {
        ResolventFamily f = free_resolvent(sys, w, cond_limit);
        const MatrixC t1G1 = sys.tau1 * f.G1;
        const MatrixC t1G2 = sys.tau1 * f.G2;
        const MatrixC t2G1 = sys.tau2 * f.G1;
        const MatrixC t2G2 = sys.tau2 * f.G2;

        GatedLU lu_b1(MatrixC::Identity(m1, m1) - sys.B1 * t1G1);
        lu_b1.require<SingularM_B1>(cond_limit, "1 - B1 tau1 G1 not invertible");
        MatrixC lam_b1 = lu_b1.solve(sys.B1);

        GatedLU lu_b02(sys.B0 - sys.B2 * t2G2);
        lu_b02.require<SingularM_B0B2>(cond_limit, "B0 - B2 tau2 G2 not invertible");
        MatrixC lam_b02 = lu_b02.solve(sys.B2);

        GatedLU lu_sigma(MatrixC::Identity(m2, m2) - lam_b02 * t2G1 * lam_b1 * t1G2);
        lu_sigma.require<SingularSigma>(cond_limit, "Sigma factor not invertible");

        if (w != z) continue; // zbar pass only gates membership in hat-Z_B

        out.M = one_oplus_b0(sys) - couple_b(sys) * (sys.tau() * f.G);
        out.LambdaB1 = lam_b1;
        out.LambdaB0B2 = lam_b02;
        out.Sigma = lu_sigma.inverse();
        out.LambdaHat = out.Sigma * lam_b02;

        out.Lambda = MatrixC::Zero(m1 + m2, m1 + m2);
        out.Lambda.topLeftCorner(m1, m1) =
            lam_b1 + lam_b1 * t1G2 * out.LambdaHat * t2G1 * lam_b1;
        out.Lambda.topRightCorner(m1, m2) = lam_b1 * t1G2 * out.LambdaHat;
        out.Lambda.bottomLeftCorner(m2, m1) = out.LambdaHat * t2G1 * lam_b1;
        out.Lambda.bottomRightCorner(m2, m2) = out.LambdaHat;
    }
    return out;
}

MatrixC alt_resolvent(const KreinSystem& sys, Complex z, double cond_limit) {
    ResolventFamily f = free_resolvent(sys, z, cond_limit);
    ResolventFamily fb = free_resolvent(sys, std::conj(z), cond_limit);
    LambdaBlocks bl = schur_blocks(sys, z, cond_limit);
    LambdaBlocks blb = schur_blocks(sys, std::conj(z), cond_limit);

    MatrixC r_b1 = f.R + f.G1 * bl.LambdaB1 * fb.G1.adjoint();
    MatrixC g_b1 = f.G2 + f.G1 * bl.LambdaB1 * (sys.tau1 * f.G2);
    MatrixC g_b1_bar = fb.G2 + fb.G1 * blb.LambdaB1 * (sys.tau1 * fb.G2);
    return r_b1 + g_b1 * bl.LambdaHat * g_b1_bar.adjoint();
}

MatrixC range_projector(const MatrixC& tau1, double rank_tol) {
    if (tau1.rows() == 0) return MatrixC::Zero(0, 0);
    Eigen::JacobiSVD<MatrixC> svd(tau1, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double cut = rank_tol * std::max(1.0, sv.size() ? sv[0] : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++rank;
    MatrixC u = svd.matrixU().leftCols(rank);
    return u * u.adjoint();
}

MatrixC recovered_operator(const KreinSystem& sys, Complex z, double cond_limit) {
    MatrixC rb = krein_resolvent(sys, z, cond_limit);
    GatedLU lu(rb);
    lu.require<SingularResolvent>(cond_limit, "R^B_z not invertible");
    return z * MatrixC::Identity(sys.n(), sys.n()) - lu.inverse();
}

BoundaryResiduals rho_and_boundary_check(const KreinSystem& sys, Complex z,
                                         double cond_limit) {
    const Eigen::Index n = sys.n(), m1 = sys.m1(), m2 = sys.m2();
    ResolventFamily f = free_resolvent(sys, z, cond_limit);
    ResolventFamily fb = free_resolvent(sys, std::conj(z), cond_limit);
    MatrixC lam = lambda_direct(sys, z, cond_limit);
    MatrixC rb = f.R + f.G * lam * fb.G.adjoint();

    MatrixC pi1 = range_projector(sys.tau1);
    MatrixC proj = MatrixC::Identity(m1 + m2, m1 + m2);
    proj.topLeftCorner(m1, m1) = pi1;

    // rho_B applied to the columns of R^B_z (a basis of dom(A_B)).
    MatrixC rho = proj * lam * fb.G.adjoint();
    MatrixC tau = sys.tau();

    BoundaryResiduals res{};

    // Green identity over the full basis: z R^B - 1 = A R^B + tau^* rho.
    MatrixC lhs = z * rb - MatrixC::Identity(n, n);
    MatrixC rhs = sys.A * rb + tau.adjoint() * rho;
    res.green_identity = rel((lhs - rhs).norm(), lhs.norm() + rhs.norm());

    // Abstract boundary condition (pi1^* B1 (+) B2) tau u = (1 (+) B0) rho u.
    MatrixC tau_rb = tau * rb;
    MatrixC lhs2(m1 + sys.m2p(), n);
    lhs2.topRows(m1) = pi1 * sys.B1 * tau_rb.topRows(m1);
    lhs2.bottomRows(sys.m2p()) = sys.B2 * tau_rb.bottomRows(m2);
    MatrixC rhs2(m1 + sys.m2p(), n);
    rhs2.topRows(m1) = rho.topRows(m1);
    rhs2.bottomRows(sys.m2p()) = sys.B0 * rho.bottomRows(m2);
    res.boundary_condition = rel((lhs2 - rhs2).norm(), lhs2.norm() + rhs2.norm() + 1.0);

    // Additive representation needs B0^{-1}.
    if (sys.m2p() != sys.m2())
        throw SingularB0("additive form needs square invertible B0");
    GatedLU lu_b0(sys.B0);
    lu_b0.require<SingularB0>(cond_limit, "B0 not invertible for the additive form");
    MatrixC a_b = recovered_operator(sys, z, cond_limit);
    MatrixC additive = sys.A + sys.tau1.adjoint() * sys.B1 * sys.tau1 +
                       sys.tau2.adjoint() * lu_b0.solve(sys.B2) * sys.tau2;
    res.additive_form = rel((a_b - additive).norm(), a_b.norm() + additive.norm());
    return res;
}

MatrixC SystemSampler::gaussian(Eigen::Index r, Eigen::Index c) {
    MatrixC m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
            m(i, j) = Complex(gauss_(rng_), gauss_(rng_)) / std::sqrt(2.0);
    return m;
}

MatrixC SystemSampler::hermitian(Eigen::Index r) {
    MatrixC x = gaussian(r, r);
    return 0.5 * (x + x.adjoint());
}

KreinSystem SystemSampler::sample(Eigen::Index n, Eigen::Index m1, Eigen::Index m2,
                                  bool invertible_b0) {
    KreinSystem s;
    s.A = hermitian(n);
    s.tau1 = gaussian(m1, n);
    s.tau2 = gaussian(m2, n);
    s.B1 = hermitian(m1);
    // Commuting-diagonal construction: B0 = C diag(e), B2 = C diag(f) with e, f
    // real, so B0 B2^* = C diag(e f) C^* is Hermitian and (Bse) holds exactly.
    MatrixC c = gaussian(m2, m2);
    VectorR e(m2), fdiag(m2);
    for (Eigen::Index i = 0; i < m2; ++i) {
        double ei = gauss_(rng_);
        if (invertible_b0 && std::abs(ei) < 0.3) ei = (ei < 0 ? -0.3 : 0.3);
        e[i] = ei;
        fdiag[i] = gauss_(rng_);
    }
    s.B0 = c * e.asDiagonal().toDenseMatrix().cast<Complex>();
    s.B2 = c * fdiag.asDiagonal().toDenseMatrix().cast<Complex>();
    s.validate();
    return s;
}

KreinSystem SystemSampler::sample_b1_only(Eigen::Index n, Eigen::Index m1,
                                          Eigen::Index m2) {
    KreinSystem s = sample(n, m1, m2, true);
    s.B0 = MatrixC::Identity(m2, m2);
    s.B2 = MatrixC::Zero(m2, m2);
    return s;
}

KreinSystem SystemSampler::sample_b0b2_only(Eigen::Index n, Eigen::Index m1,
                                            Eigen::Index m2) {
    KreinSystem s = sample(n, m1, m2, true);
    s.B1 = MatrixC::Zero(m1, m1);
    return s;
}

} // namespace kscat
