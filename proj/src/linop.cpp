#include "freeprod/linop.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace freeprod {

Vector ChainOp::apply(const Vector& v) const {
    Vector cur = v;
    for (const auto& f : factors) cur = f * cur;
    return cur;
}

Vector ChainOp::apply_adjoint(const Vector& v) const {
    Vector cur = v;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
        cur = it->adjoint() * cur;
    return cur;
}

Vector KronSumOp::apply(const Vector& v) const {
    Vector out = Vector::Zero(rows());
    for (const auto& part : parts) {
        std::int64_t pr = part.op->rows();
        for (int j = 0; j < s; ++j) {
            // column j of V * coeff^T: sum_l coeff(j,l) v[:,l]
            Vector col = Vector::Zero(base_cols);
            for (int l = 0; l < s; ++l) {
                cxd c = part.coeff(j, l);
                if (c == cxd(0.0)) continue;
                for (std::int64_t w = 0; w < base_cols; ++w)
                    col(w) += c * v(w * s + l);
            }
            Vector res = part.op->apply(col);
            for (std::int64_t w = 0; w < pr; ++w) out(w * s + j) += res(w);
        }
    }
    return out;
}

Vector KronSumOp::apply_adjoint(const Vector& v) const {
    Vector out = Vector::Zero(cols());
    for (const auto& part : parts) {
        std::int64_t pr = part.op->rows();
        Matrix ch = part.coeff.adjoint();
        for (int j = 0; j < s; ++j) {
            Vector col = Vector::Zero(pr);
            for (int l = 0; l < s; ++l) {
                cxd c = ch(j, l);
                if (c == cxd(0.0)) continue;
                for (std::int64_t w = 0; w < pr; ++w)
                    col(w) += c * v(w * s + l);
            }
            Vector res = part.op->apply_adjoint(col);
            for (std::int64_t w = 0; w < base_cols; ++w) out(w * s + j) += res(w);
        }
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Vector deterministic_start(std::int64_t n) {
    Vector v(n);
    for (std::int64_t i = 0; i < n; ++i) {
        double a = static_cast<double>(splitmix64(i) >> 11) / 9007199254740992.0;
        double b = static_cast<double>(splitmix64(i ^ 0x5bd1e995) >> 11) /
                   9007199254740992.0;
        v(i) = cxd(2.0 * a - 1.0, 2.0 * b - 1.0);
    }
    v /= v.norm();
    return v;
}

NormResult finish(const LinOp& op, double sigma, const Vector& v, int matvecs,
                  bool dense) {
    NormResult r;
    r.value = sigma;
    r.right_singular = v;
    r.matvecs = matvecs;
    r.dense = dense;
    Vector av = op.apply(v);
    double n = av.norm();
    if (n > 0 && sigma > 0) {
        Vector u = av / n;
        r.residual = (av - sigma * u).norm();
    } else {
        r.residual = n;
    }
    return r;
}

NormResult dense_norm(const LinOp& op) {
    std::int64_t n = op.cols();
    Matrix g(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        g.col(j) = op.apply_adjoint(op.apply(e));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es((g + g.adjoint()) / 2.0);
    std::int64_t top;
    es.eigenvalues().maxCoeff(&top);
    double lam = std::max(0.0, es.eigenvalues()(top));
    Vector v = es.eigenvectors().col(top);
    return finish(op, std::sqrt(lam), v, static_cast<int>(2 * n), true);
}

// Lanczos on A^* A with full reorthogonalization and restarts.
NormResult lanczos_norm(const LinOp& op, const NormOptions& opts) {
    std::int64_t n = op.cols();
    Vector v0 = deterministic_start(n);
    int matvecs = 0;
    double prev_lam = -1.0;
    Vector best_v = v0;
    const int block = 90;

    while (matvecs < opts.max_matvecs) {
        std::vector<Vector> basis;
        std::vector<double> alpha, beta;
        Vector v = v0;
        Vector w;
        double lam = 0.0;
        for (int k = 0; k < block && matvecs < opts.max_matvecs; ++k) {
            basis.push_back(v);
            w = op.apply_adjoint(op.apply(v));
            matvecs += 2;
            double a = std::real(basis[k].dot(w));
            alpha.push_back(a);
            w -= a * basis[k];
            if (k > 0) w -= beta[k - 1] * basis[k - 1];
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) w -= b.dot(w) * b;
            double bnorm = w.norm();
            beta.push_back(bnorm);
            if (bnorm < 1e-14) break;
            v = w / bnorm;
        }
        int k = static_cast<int>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        std::int64_t top;
        es.eigenvalues().maxCoeff(&top);
        lam = std::max(0.0, es.eigenvalues()(top));
        Eigen::VectorXd s = es.eigenvectors().col(top);
        Vector ritzvec = Vector::Zero(n);
        for (int i = 0; i < k; ++i) ritzvec += cxd(s(i)) * basis[i];
        ritzvec /= ritzvec.norm();
        best_v = ritzvec;

        bool converged = prev_lam >= 0 &&
            std::abs(lam - prev_lam) <= opts.rel_tol * std::max(1.0, lam);
        // residual on the tridiagonal: last component times beta
        double tres = (k > 0 && beta[k - 1] > 1e-14) ? std::abs(beta[k - 1] * s(k - 1)) : 0.0;
        if (tres <= opts.rel_tol * std::max(1.0, lam)) converged = true;
        prev_lam = lam;
        v0 = ritzvec;
        if (converged || static_cast<std::int64_t>(k) >= n) {
            return finish(op, std::sqrt(lam), ritzvec, matvecs, false);
        }
    }
    return finish(op, std::sqrt(std::max(prev_lam, 0.0)), best_v, matvecs, false);
}

}  // namespace

NormResult operator_norm(const LinOp& op, const NormOptions& opts) {
    if (op.cols() == 0 || op.rows() == 0) {
        NormResult r;
        r.right_singular = Vector::Zero(op.cols());
        return r;
    }
    if (op.cols() <= opts.dense_width) return dense_norm(op);
    return lanczos_norm(op, opts);
}

NormResult operator_norm(const SpMat& m, const NormOptions& opts) {
    SparseOp op(m);
    return operator_norm(static_cast<const LinOp&>(op), opts);
}

NormResult operator_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        NormResult r;
        r.right_singular = Vector::Zero(m.cols());
        return r;
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    NormResult r;
    r.value = svd.singularValues()(0);
    r.right_singular = svd.matrixV().col(0);
    r.dense = true;
    r.matvecs = 0;
    Vector av = m * r.right_singular;
    double n = av.norm();
    r.residual = (n > 0 && r.value > 0) ? (av - r.value * (av / n)).norm() : n;
    return r;
}

}  // namespace freeprod
