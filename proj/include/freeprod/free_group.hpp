// free_group.hpp — truncated left regular representation of a free group on
// the ball of reduced words, Haagerup / Haagerup-Pisier checks, and radial
// Schur-multiplier symbols.

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "freeprod/linop.hpp"

namespace freeprod {

// Reduced word: sequence of nonzero ints, +g for generators, -g for inverses
// (g = 1..k); no adjacent inverse pairs.
using GroupWord = std::vector<int>;

GroupWord reduce_word(const GroupWord& w);
GroupWord group_mul(const GroupWord& a, const GroupWord& b);
GroupWord group_inv(const GroupWord& a);
// Word metric |v^{-1} w|.
int word_distance(const GroupWord& v, const GroupWord& w);

class GroupBall {
  public:
    GroupBall(int k, int R);

    int generators() const { return k_; }
    int radius() const { return R_; }
    std::int64_t dim(int r) const;          // words of length <= r
    std::int64_t dim() const { return dim(R_); }
    const GroupWord& word_at(std::int64_t i) const { return words_[i]; }
    std::int64_t index_of(const GroupWord& w) const;

  private:
    int k_, R_;
    std::vector<GroupWord> words_;
    std::vector<std::int64_t> offsets_;
    std::unordered_map<std::string, std::int64_t> index_;
};

// Exact columns of lambda(w): l2(B_domain_R) -> l2(B_{domain_R + |w|}).
SpMat lambda_rect(const GroupBall& ball, const GroupWord& w, int domain_R);

struct HaagerupReport {
    int d = 0, R = 0;
    double l2 = 0.0;
    double t_R = 0.0;
    double constant = 0.0;  // d+1
    bool lower_ok = false;  // l2 <= t_R + tol
    bool upper_ok = false;  // t_R <= (d+1) l2 + tol
    bool pass() const { return lower_ok && upper_ok; }
};

// Coefficients supported on reduced words of length exactly d.
HaagerupReport haagerup_check(const GroupBall& ball,
                              const std::vector<std::pair<GroupWord, cxd>>& coeffs,
                              int R);

struct LeinertReport {
    int R = 0;
    double t_R = 0.0;
    double col = 0.0, row = 0.0;
    double bound = 0.0;      // 2 max(col, row)
    bool upper_ok = false;   // t_R <= bound + tol
    bool converse_ok = false;  // max(col,row) <= t_R + tol
    bool pass() const { return upper_ok && converse_ok; }
};

// sum_i lambda(g_i) (x) x_i with matrix coefficients.
LeinertReport leinert_check(const GroupBall& ball, const std::vector<Matrix>& xs,
                            int R);

// Symbol a_{v,w} = f(|v^{-1} w|) over the ball; f given on lengths 0..2R.
Matrix radial_symbol(const GroupBall& ball, const std::vector<cxd>& f);

}  // namespace freeprod
