#include "freeprod/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace freeprod {

AlgebraWithState::AlgebraWithState(int n, Matrix rho) : n_(n), rho_(std::move(rho)) {
    if (n_ <= 0) throw BadParameter("matrix size must be positive");
    if (rho_.rows() != n_ || rho_.cols() != n_)
        throw DimensionMismatch("rho must be n x n");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw NotDensityMatrix("rho is not Hermitian");
    if (std::abs(rho_.trace() - cxd(1.0, 0.0)) > kEpsCenter)
        throw NotDensityMatrix("trace(rho) != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
    if (es.eigenvalues().minCoeff() < kEpsFaithful)
        throw NotFaithful("min eigenvalue of rho below faithfulness threshold");

    // Orthonormalize the centered matrix units under <a,b> = phi(a* b).
    // Modified Gram-Schmidt with one re-orthogonalization pass.
    basis_.reserve(hbar_dim());
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            Matrix e = Matrix::Zero(n_, n_);
            e(i, j) = 1.0;
            Matrix v = e - state(e) * Matrix::Identity(n_, n_);
            for (int pass = 0; pass < 2; ++pass)
                for (const Matrix& b : basis_) v -= inner(b, v) * b;
            double nrm = std::sqrt(std::abs(inner(v, v)));
            if (nrm > 1e-10) basis_.push_back(v / nrm);
        }
    }
    if (static_cast<int>(basis_.size()) != hbar_dim())
        throw NotFaithful("centered basis has unexpected rank");
}

void AlgebraWithState::check_dims(const Matrix& a) const {
    if (a.rows() != n_ || a.cols() != n_)
        throw DimensionMismatch("matrix must be n x n");
}

cxd AlgebraWithState::state(const Matrix& a) const {
    check_dims(a);
    return (rho_ * a).trace();
}

Letter AlgebraWithState::center(const Matrix& a) const {
    check_dims(a);
    return Letter{0, a - state(a) * Matrix::Identity(n_, n_)};
}

cxd AlgebraWithState::inner(const Matrix& a, const Matrix& b) const {
    return (rho_ * a.adjoint() * b).trace();
}

cxd AlgebraWithState::pairing_op(const Matrix& a, const Matrix& b) const {
    return (rho_ * a * b.adjoint()).trace();
}

cxd AlgebraWithState::pairing_dual(const Matrix& a, const Matrix& b) const {
    return (rho_ * a * b).trace();
}

Vector AlgebraWithState::hat_coords(const Matrix& a) const {
    check_dims(a);
    Vector c(gns_dim());
    c(0) = state(a);
    for (int k = 0; k < hbar_dim(); ++k) c(k + 1) = inner(basis_[k], a);
    return c;
}

Vector AlgebraWithState::hbar_coords(const Matrix& a) const {
    check_dims(a);
    Vector c(hbar_dim());
    for (int k = 0; k < hbar_dim(); ++k) c(k) = inner(basis_[k], a);
    return c;
}

Matrix AlgebraWithState::gns_left_mult(const Matrix& a) const {
    check_dims(a);
    Matrix m(gns_dim(), gns_dim());
    m.col(0) = hat_coords(a);
    for (int k = 0; k < hbar_dim(); ++k) m.col(k + 1) = hat_coords(a * basis_[k]);
    return m;
}

AlgebraWithState make_algebra(int n, const Matrix& rho) {
    return AlgebraWithState(n, rho);
}

FamilyPtr make_family(std::vector<AlgebraWithState> algebras) {
    auto fam = std::make_shared<AlgebraFamily>();
    fam->algebras = std::move(algebras);
    return fam;
}

Matrix bernoulli_symbol() {
    Matrix u(2, 2);
    u << 1.0, 0.0, 0.0, -1.0;
    return u;
}

FamilyPtr bernoulli_family(int count) {
    std::vector<AlgebraWithState> algs;
    for (int i = 0; i < count; ++i)
        algs.push_back(make_algebra(2, Matrix::Identity(2, 2) / 2.0));
    return make_family(std::move(algs));
}

}  // namespace freeprod
