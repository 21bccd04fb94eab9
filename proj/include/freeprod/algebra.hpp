// algebra.hpp — finite-dimensional C*-algebras M_n with a faithful state and
// their GNS Hilbert-space data (orthonormalized centered basis, hat map,
// left-multiplication representation).

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "freeprod/errors.hpp"

namespace freeprod {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kEpsFaithful = 1e-8;
constexpr double kEpsCenter = 1e-10;

class AlgebraWithState;

// A phi-centered element of one algebra of the family.
struct Letter {
    int algebra = 0;
    Matrix matrix;
};

class AlgebraWithState {
  public:
    // rho must be Hermitian with trace 1 and min eigenvalue >= kEpsFaithful.
    AlgebraWithState(int n, Matrix rho);

    int n() const { return n_; }
    int gns_dim() const { return n_ * n_; }
    int hbar_dim() const { return n_ * n_ - 1; }
    const Matrix& rho() const { return rho_; }
    // Orthonormal basis of Hbar = xi^perp, as matrices.
    const std::vector<Matrix>& hbar_basis() const { return basis_; }

    cxd state(const Matrix& a) const;
    Letter center(const Matrix& a) const;

    // GNS inner product <hat a, hat b> = phi(a* b).
    cxd inner(const Matrix& a, const Matrix& b) const;
    // Opposite-side (row) pairing phi(a b*).
    cxd pairing_op(const Matrix& a, const Matrix& b) const;
    // H^op duality phi(a b).
    cxd pairing_dual(const Matrix& a, const Matrix& b) const;

    // Coordinates of hat(a) in the orthonormal basis {xi} u hbar_basis.
    Vector hat_coords(const Matrix& a) const;
    // Coordinates of the centered part of hat(a) in hbar_basis alone.
    Vector hbar_coords(const Matrix& a) const;

    // Matrix of b-hat -> hat(a b) in the basis {xi} u hbar_basis.
    Matrix gns_left_mult(const Matrix& a) const;

  private:
    void check_dims(const Matrix& a) const;

    int n_;
    Matrix rho_;
    std::vector<Matrix> basis_;
};

AlgebraWithState make_algebra(int n, const Matrix& rho);

struct AlgebraFamily {
    std::vector<AlgebraWithState> algebras;

    int size() const { return static_cast<int>(algebras.size()); }
    const AlgebraWithState& at(int i) const { return algebras.at(i); }
};

using FamilyPtr = std::shared_ptr<const AlgebraFamily>;

FamilyPtr make_family(std::vector<AlgebraWithState> algebras);

// The two-point Bernoulli symbol diag(1,-1) in M_2 with rho = I/2.
Matrix bernoulli_symbol();
// Family of N copies of (M_2, tr/2).
FamilyPtr bernoulli_family(int count);

}  // namespace freeprod
