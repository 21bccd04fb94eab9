// fock.hpp — truncated free Fock space on the GNS spaces of an algebra
// family, exact rectangular band operators for letters and free-product
// elements, length/start projections, the gradation unitary U_z and band
// components H_n.

#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <memory>
#include <vector>

#include "freeprod/algebra.hpp"
#include "freeprod/free_element.hpp"
#include "freeprod/linop.hpp"

namespace freeprod {

// A basis word: sequence of (algebra index, hbar-basis index) with
// consecutive algebra indices distinct. Empty = vacuum.
using Word = std::vector<std::pair<int, int>>;

class FockSpace {
  public:
    FockSpace(FamilyPtr family, int L);

    const FamilyPtr& family() const { return family_; }
    int num_algebras() const { return family_->size(); }
    int L() const { return L_; }

    // Number of words of length exactly p.
    std::int64_t stratum_dim(int p) const;
    // Index of the first length-p word.
    std::int64_t stratum_offset(int p) const;
    // Total dimension of the span of words of length <= level.
    std::int64_t dim(int level) const;
    std::int64_t dim() const { return dim(L_); }

    // Enumeration: by length, then lexicographically on the index tuple,
    // then on the basis-element tuple.
    std::int64_t index_of(const Word& w) const;
    Word word_at(std::int64_t idx) const;
    int length_of(std::int64_t idx) const;

  private:
    FamilyPtr family_;
    int L_;
    std::vector<int> letter_dims_;                      // n_i^2 - 1
    std::vector<std::vector<std::int64_t>> suffix_;     // suffix_[q][prev+1]
    std::vector<std::int64_t> offsets_;                 // per length
};

using FockPtr = std::shared_ptr<const FockSpace>;

FockPtr make_fock(FamilyPtr family, int L);

// Exact rectangular matrix of a degree-<=d element: domain = words of
// length <= domain_L, codomain = words of length <= codomain_L. Rows of
// length q are exact whenever every contributing path stays within the
// codomain cap, which holds for q <= 2*codomain_L - domain_L - degree.
struct BandOperator {
    FockPtr fock;
    int domain_L = 0;
    int codomain_L = 0;
    int degree = 0;
    SpMat mat;

    std::int64_t rows() const { return mat.rows(); }
    std::int64_t cols() const { return mat.cols(); }
    // Dense (target length q, source length p) sub-block.
    Matrix block(int q, int p) const;
};

// The tri-diagonal rectangle of one centered letter.
BandOperator represent_letter(const FockPtr& fock, const Letter& letter,
                              int domain_L, int codomain_cap = -1);

// Exact rectangle of a FreeElement; codomain_cap defaults to
// domain_L + degree (fully exact).
BandOperator represent_element(const FockPtr& fock, const FreeElement& x,
                               int domain_L, int codomain_cap = -1);

// 0/1 diagonal of words starting with algebra k (vacuum excluded), on the
// span of words of length <= level.
Eigen::VectorXd projection_Pk(const FockPtr& fock, int k, int level);
// 0/1 diagonal of the length-p stratum.
Eigen::VectorXd length_projection(const FockPtr& fock, int p, int level);
// Diagonal unitary z^length.
Vector apply_Uz(const FockPtr& fock, cxd z, int level);

// Exact block split: the sub-band with (target length - source length) = n.
BandOperator band_component(const BandOperator& op, int n);
// Discrete Fourier average over 2*degree+1 roots of unity; cross-check only.
BandOperator band_component_fourier(const BandOperator& op, int n);

// Multiplies a sparse matrix by a 0/1 diagonal on rows/columns.
SpMat scale_rows(const SpMat& m, const Eigen::VectorXd& diag);
SpMat scale_cols(const SpMat& m, const Eigen::VectorXd& diag);

}  // namespace freeprod
