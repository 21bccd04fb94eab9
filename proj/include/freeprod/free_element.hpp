// free_element.hpp — symbolic arithmetic in the algebraic free product:
// elementary tensors of centered letters with alternating algebra indices,
// the free-product state, homogeneous parts, state-preserving maps and the
// Poisson semigroup.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "freeprod/algebra.hpp"

namespace freeprod {

class FreeElement {
  public:
    struct Term {
        cxd coeff;
        std::vector<Letter> letters;  // alternating algebra indices, centered
    };

    explicit FreeElement(FamilyPtr family, cxd scalar = 0.0)
        : family_(std::move(family)), scalar_(scalar) {}

    static FreeElement scalar_element(FamilyPtr family, cxd c) {
        return FreeElement(std::move(family), c);
    }
    // Centers a before storing; throws DimensionMismatch on bad sizes.
    static FreeElement letter_element(const FamilyPtr& family, int algebra,
                                      const Matrix& a, cxd coeff = 1.0);
    static FreeElement from_terms(FamilyPtr family, cxd scalar,
                                  std::vector<Term> terms);

    const FamilyPtr& family() const { return family_; }
    cxd scalar() const { return scalar_; }
    const std::vector<Term>& terms() const { return terms_; }
    int degree() const;

    FreeElement operator+(const FreeElement& other) const;
    FreeElement operator-(const FreeElement& other) const;
    FreeElement operator*(cxd c) const;

  private:
    FamilyPtr family_;
    cxd scalar_{0.0};
    std::vector<Term> terms_;

    void canonicalize();
    friend FreeElement multiply(const FreeElement&, const FreeElement&);
    friend class StatePreservingMap;
    friend FreeElement map_letters(const FreeElement&,
                                   const std::vector<Matrix>&);
};

FreeElement multiply(const FreeElement& x, const FreeElement& y);
cxd free_state(const FreeElement& x);
FreeElement homogeneous_part(const FreeElement& x, int d);
FreeElement truncate_degree(const FreeElement& x, int d);
FreeElement adjoint(const FreeElement& x);

// Per-algebra linear maps T_i with T_i(1) = 1 and phi_i o T_i = phi_i.
// Complete positivity is certified (or not) through the Choi matrix.
class StatePreservingMap {
  public:
    // maps[i] acts on column-major vec(a) for algebra i.
    StatePreservingMap(FamilyPtr family, std::vector<Matrix> vec_maps);

    static StatePreservingMap identity(const FamilyPtr& family);
    // T_i(a) = r a + (1-r) phi_i(a) 1.
    static StatePreservingMap interpolation_with_state(const FamilyPtr& family,
                                                       double r);
    // Full conditional expectation a -> phi_i(a) 1.
    static StatePreservingMap state_projection(const FamilyPtr& family);

    bool cp_certified() const { return cp_certified_; }
    const std::vector<double>& choi_min_eigs() const { return choi_min_eigs_; }

    Matrix apply(int algebra, const Matrix& a) const;

  private:
    FamilyPtr family_;
    std::vector<Matrix> vec_maps_;
    bool cp_certified_ = false;
    std::vector<double> choi_min_eigs_;
};

// Letterwise application T_{i_1}(a_1) x ... x T_{i_d}(a_d); fixes scalars.
FreeElement bd_free_product_map(const StatePreservingMap& t, const FreeElement& x);

// Scales the degree-k part by r^k.
FreeElement poisson(const FreeElement& x, double r);

struct TruncatedPoisson {
    FreeElement element;
    double cb_bound;  // 1 + 4 n r^n / (1-r)^2
    double r;
    int n;
};

TruncatedPoisson poisson_truncated(const FreeElement& x, double r, int n);
// The sequence member with r = 1 - 1/sqrt(n).
TruncatedPoisson poisson_tn(const FreeElement& x, int n);

double truncated_poisson_bound(double r, int n);

}  // namespace freeprod
