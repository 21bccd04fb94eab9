#include "freeprod/schur.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace freeprod {

namespace {

constexpr double kFeasMargin = 1e-9;
constexpr int kDykstraCap = 20000;

Matrix psd_projection(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((x + x.adjoint()) / 2.0);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

// Affine set: Hermitian, off-diagonal block fixed to a, diag <= c.
Matrix affine_projection(const Matrix& x, const Matrix& a, double c) {
    std::int64_t m = a.rows();
    Matrix y = (x + x.adjoint()) / 2.0;
    y.block(0, m, m, a.cols()) = a;
    y.block(m, 0, a.cols(), m) = a.adjoint();
    for (std::int64_t i = 0; i < y.rows(); ++i)
        y(i, i) = cxd(std::min(std::real(y(i, i)), c), 0.0);
    return y;
}

double affine_violation(const Matrix& x, const Matrix& a, double c) {
    std::int64_t m = a.rows();
    double v = (x.block(0, m, m, a.cols()) - a).cwiseAbs().maxCoeff();
    for (std::int64_t i = 0; i < x.rows(); ++i)
        v = std::max(v, std::real(x(i, i)) - c);
    return v;
}

struct Feasibility {
    bool feasible = false;
    Matrix witness;  // PSD matrix nearly satisfying the affine constraints
    double violation = 0.0;
    int iters = 0;
};

// Dykstra alternating projections between the PSD cone and the affine set.
Feasibility dykstra_feasible(const Matrix& a, double c, const Matrix& start,
                             double margin) {
    std::int64_t n = 2 * a.rows();
    Matrix x = start;
    Matrix p = Matrix::Zero(n, n), q = Matrix::Zero(n, n);
    Feasibility out;
    double best = 1e300;
    int stall = 0;
    for (int it = 0; it < kDykstraCap; ++it) {
        Matrix y = psd_projection(x + p);
        p = x + p - y;
        x = affine_projection(y + q, a, c);
        q = y + q - x;
        double viol = affine_violation(y, a, c);
        out.iters = it + 1;
        if (viol < best - 1e-13) {
            best = viol;
            stall = 0;
        } else if (++stall > 150) {
            out.witness = y;
            out.violation = best;
            out.feasible = best <= margin;
            return out;
        }
        if (viol <= margin) {
            out.witness = y;
            out.violation = viol;
            out.feasible = true;
            return out;
        }
    }
    out.violation = best;
    out.feasible = false;
    return out;
}

CbFactorization factorization_from(const Matrix& block, std::int64_t m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((block + block.adjoint()) / 2.0);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix v = lam.asDiagonal() * es.eigenvectors().adjoint();  // block ~= v^H v
    CbFactorization f;
    f.x = v.leftCols(m);
    f.y = v.rightCols(block.cols() - m);
    double mx = 0.0, my = 0.0;
    for (std::int64_t s = 0; s < f.x.cols(); ++s) mx = std::max(mx, f.x.col(s).norm());
    for (std::int64_t t = 0; t < f.y.cols(); ++t) my = std::max(my, f.y.col(t).norm());
    f.value = mx * my;
    return f;
}

}  // namespace

double CbFactorization::reconstruction_error(const Matrix& a) const {
    Matrix rec = x.adjoint() * y;
    return (rec - a).cwiseAbs().maxCoeff();
}

CbResult cb_norm(const Matrix& a, double tol) {
    if (tol <= 0) throw BadParameter("tol must be positive");
    if (a.rows() == 0 || a.cols() == 0) throw BadParameter("empty symbol");
    std::int64_t m = a.rows(), mc = a.cols();
    CbResult res;

    double lo = a.cwiseAbs().maxCoeff();  // single-entry compression
    if (lo == 0.0) {
        res.value = res.lo = res.hi = 0.0;
        res.fact.x = Matrix::Zero(1, m);
        res.fact.y = Matrix::Zero(1, mc);
        res.certificate = "exact-bracket";
        return res;
    }

    // Explicit feasible completions give upper brackets.
    double hi = 1e300;
    Matrix best_completion;
    {
        // rows factorization: x_s = conj(row_s)/alpha, y_t = alpha e_t
        double maxrow = 0.0, maxcol = 0.0;
        for (std::int64_t s = 0; s < m; ++s) maxrow = std::max(maxrow, a.row(s).norm());
        for (std::int64_t t = 0; t < mc; ++t) maxcol = std::max(maxcol, a.col(t).norm());
        double cand = std::min(maxrow, maxcol);
        Matrix x2(m + mc, m + mc);
        if (maxrow <= maxcol) {
            double al2 = maxrow;
            x2.topLeftCorner(m, m) = a * a.adjoint() / al2;
            x2.topRightCorner(m, mc) = a;
            x2.bottomLeftCorner(mc, m) = a.adjoint();
            x2.bottomRightCorner(mc, mc) = al2 * Matrix::Identity(mc, mc);
        } else {
            double al2 = maxcol;
            x2.topLeftCorner(m, m) = al2 * Matrix::Identity(m, m);
            x2.topRightCorner(m, mc) = a;
            x2.bottomLeftCorner(mc, m) = a.adjoint();
            x2.bottomRightCorner(mc, mc) = a.adjoint() * a / al2;
        }
        hi = cand;
        best_completion = x2;
    }
    if (m == mc && (a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-12) {
        Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) / 2.0);
        if (es.eigenvalues().minCoeff() >= -1e-12) {
            double maxdiag = a.diagonal().real().maxCoeff();
            if (maxdiag < hi) {
                hi = maxdiag;
                Matrix x2(2 * m, 2 * m);
                x2.topLeftCorner(m, m) = a;
                x2.topRightCorner(m, m) = a;
                x2.bottomLeftCorner(m, m) = a;
                x2.bottomRightCorner(m, m) = a;
                best_completion = x2;
            }
        }
    }

    int iters = 0;
    bool used_dykstra = false;
    double scale = std::max(1.0, lo);
    while (hi - lo > tol) {
        double c = 0.5 * (lo + hi);
        used_dykstra = true;
        Feasibility f = dykstra_feasible(a, c, best_completion, kFeasMargin * scale);
        iters += f.iters;
        if (f.feasible) {
            hi = c;
            best_completion = f.witness;
        } else {
            lo = c;
            if (f.violation <= 2 * kFeasMargin * scale) {
                // inconclusive margin; stop with the current bracket
                res.converged = false;
                break;
            }
        }
        if (iters > 40 * kDykstraCap) {
            res.converged = false;
            break;
        }
    }

    res.lo = lo;
    res.hi = hi;
    res.value = hi;
    res.dykstra_iters = iters;
    res.certificate = used_dykstra ? "sdp-bracketed" : "exact-bracket";
    res.fact = factorization_from(best_completion, m);
    return res;
}

PolarizeResult polarize(const Matrix& x, const Matrix& y, double eps) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionMismatch("factorization halves must match");
    if (eps < 0) throw PreconditionViolated("eps must be nonnegative");
    std::int64_t m = x.cols();
    double cap = std::sqrt(1.0 + eps) + 1e-7;
    for (std::int64_t s = 0; s < m; ++s) {
        if (x.col(s).norm() > cap || y.col(s).norm() > cap)
            throw PreconditionViolated("vector norms exceed sqrt(1+eps)");
        if (std::abs(x.col(s).dot(y.col(s)) - cxd(1.0)) > 1e-7)
            throw PreconditionViolated("symbol must have unit diagonal");
    }
    Matrix sum = (x + y) / 2.0, diff = (x - y) / 2.0;
    PolarizeResult r;
    r.eps = eps;
    r.a = sum.adjoint() * sum;
    r.b = diff.adjoint() * diff;
    r.diag_correction = Eigen::VectorXd(m);
    r.max_half_diff_sq = 0.0;
    for (std::int64_t s = 0; s < m; ++s) {
        double hd = diff.col(s).squaredNorm();
        r.max_half_diff_sq = std::max(r.max_half_diff_sq, hd);
        r.diag_correction(s) = 1.0 + eps - std::real(r.a(s, s));
    }
    return r;
}

}  // namespace freeprod
