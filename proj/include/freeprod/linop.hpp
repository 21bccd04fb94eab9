// linop.hpp — matrix-free linear operators and certified largest-singular-
// value computation (dense eigensolver for small widths, Lanczos on A*A
// otherwise, with a residual certificate).

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <memory>
#include <vector>

#include "freeprod/algebra.hpp"

namespace freeprod {

using SpMat = Eigen::SparseMatrix<cxd>;
using Triplet = Eigen::Triplet<cxd>;

struct LinOp {
    virtual ~LinOp() = default;
    virtual std::int64_t rows() const = 0;
    virtual std::int64_t cols() const = 0;
    virtual Vector apply(const Vector& v) const = 0;
    virtual Vector apply_adjoint(const Vector& v) const = 0;
};

struct SparseOp final : LinOp {
    explicit SparseOp(SpMat m) : mat(std::move(m)) {}
    SpMat mat;
    std::int64_t rows() const override { return mat.rows(); }
    std::int64_t cols() const override { return mat.cols(); }
    Vector apply(const Vector& v) const override { return mat * v; }
    Vector apply_adjoint(const Vector& v) const override { return mat.adjoint() * v; }
};

// Product F_k ... F_1 of sparse factors (applied right to left).
struct ChainOp final : LinOp {
    std::vector<SpMat> factors;  // factors[0] applied first
    std::int64_t rows() const override { return factors.back().rows(); }
    std::int64_t cols() const override { return factors.front().cols(); }
    Vector apply(const Vector& v) const override;
    Vector apply_adjoint(const Vector& v) const override;
};

// sum_t kron(part_t, coeff_t) acting on C^base (x) C^s, index = word*s + j.
// Parts may have fewer rows than `out_rows` (zero padding at the bottom).
struct KronSumOp final : LinOp {
    struct Part {
        std::shared_ptr<const LinOp> op;
        Matrix coeff;  // s x s
    };
    std::vector<Part> parts;
    std::int64_t base_rows = 0, base_cols = 0;
    int s = 1;

    std::int64_t rows() const override { return base_rows * s; }
    std::int64_t cols() const override { return base_cols * s; }
    Vector apply(const Vector& v) const override;
    Vector apply_adjoint(const Vector& v) const override;
};

struct NormResult {
    double value = 0.0;
    double residual = 0.0;   // ||A v - sigma u||
    int matvecs = 0;
    bool dense = false;
    Vector right_singular;   // domain-side witness
};

struct NormOptions {
    double rel_tol = 1e-10;
    int max_matvecs = 10000;
    std::int64_t dense_width = 600;
};

NormResult operator_norm(const LinOp& op, const NormOptions& opts = {});
NormResult operator_norm(const SpMat& m, const NormOptions& opts = {});
NormResult operator_norm(const Matrix& m);

}  // namespace freeprod
