#include "freeprod/free_group.hpp"

#include <algorithm>
#include <cmath>

namespace freeprod {

GroupWord reduce_word(const GroupWord& w) {
    GroupWord out;
    for (int g : w) {
        if (g == 0) throw BadParameter("0 is not a generator");
        if (!out.empty() && out.back() == -g)
            out.pop_back();
        else
            out.push_back(g);
    }
    return out;
}

GroupWord group_mul(const GroupWord& a, const GroupWord& b) {
    GroupWord c = a;
    c.insert(c.end(), b.begin(), b.end());
    return reduce_word(c);
}

GroupWord group_inv(const GroupWord& a) {
    GroupWord c(a.rbegin(), a.rend());
    for (int& g : c) g = -g;
    return c;
}

int word_distance(const GroupWord& v, const GroupWord& w) {
    size_t lcp = 0;
    while (lcp < v.size() && lcp < w.size() && v[lcp] == w[lcp]) ++lcp;
    return static_cast<int>(v.size() + w.size() - 2 * lcp);
}

namespace {
std::string word_key(const GroupWord& w) {
    std::string s;
    s.reserve(w.size() * 2);
    for (int g : w) {
        s.push_back(static_cast<char>(g < 0 ? 'A' - g : 'a' + g));
    }
    return s;
}
}  // namespace

GroupBall::GroupBall(int k, int R) : k_(k), R_(R) {
    if (k < 1) throw BadParameter("need at least one generator");
    if (R < 0) throw BadParameter("radius must be nonnegative");
    offsets_.push_back(0);
    words_.push_back({});
    offsets_.push_back(1);
    std::vector<GroupWord> frontier = {{}};
    for (int p = 1; p <= R; ++p) {
        std::vector<GroupWord> next;
        for (const auto& w : frontier) {
            for (int g = 1; g <= k_; ++g) {
                for (int sg : {g, -g}) {
                    if (!w.empty() && w.back() == -sg) continue;
                    GroupWord nw = w;
                    nw.push_back(sg);
                    next.push_back(std::move(nw));
                }
            }
        }
        std::sort(next.begin(), next.end());
        for (auto& w : next) words_.push_back(std::move(w));
        offsets_.push_back(static_cast<std::int64_t>(words_.size()));
        frontier.clear();
        for (std::int64_t i = offsets_[p]; i < offsets_[p + 1]; ++i)
            frontier.push_back(words_[i]);
    }
    index_.reserve(words_.size() * 2);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(words_.size()); ++i)
        index_[word_key(words_[i])] = i;
}

std::int64_t GroupBall::dim(int r) const {
    if (r < 0) return 0;
    if (r > R_) throw CapacityExceeded("radius exceeds ball capacity");
    return offsets_[r + 1];
}

std::int64_t GroupBall::index_of(const GroupWord& w) const {
    auto it = index_.find(word_key(w));
    if (it == index_.end()) throw CapacityExceeded("word outside the ball");
    return it->second;
}

SpMat lambda_rect(const GroupBall& ball, const GroupWord& w, int domain_R) {
    GroupWord rw = reduce_word(w);
    int len = static_cast<int>(rw.size());
    if (domain_R + len > ball.radius())
        throw CapacityExceeded("domain_R + |w| exceeds ball capacity");
    std::int64_t cols = ball.dim(domain_R);
    std::int64_t rows = ball.dim(domain_R + len);
    std::vector<Triplet> t;
    for (std::int64_t c = 0; c < cols; ++c) {
        GroupWord img = group_mul(rw, ball.word_at(c));
        t.emplace_back(ball.index_of(img), c, cxd(1.0));
    }
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

HaagerupReport haagerup_check(const GroupBall& ball,
                              const std::vector<std::pair<GroupWord, cxd>>& coeffs,
                              int R) {
    HaagerupReport rep;
    rep.R = R;
    int d = -1;
    double l2sq = 0.0;
    SpMat sum;
    bool first = true;
    for (const auto& [w, c] : coeffs) {
        GroupWord rw = reduce_word(w);
        if (d < 0) d = static_cast<int>(rw.size());
        if (static_cast<int>(rw.size()) != d)
            throw BadParameter("coefficients must be supported on a single length");
        l2sq += std::norm(c);
        SpMat lw = lambda_rect(ball, rw, R) * c;
        sum = first ? lw : SpMat(sum + lw);
        first = false;
    }
    rep.d = d < 0 ? 0 : d;
    rep.l2 = std::sqrt(l2sq);
    rep.constant = rep.d + 1.0;
    rep.t_R = first ? 0.0 : operator_norm(sum).value;
    double tol = 1e-8 * std::max(1.0, rep.l2);
    rep.lower_ok = rep.l2 <= rep.t_R + tol;
    rep.upper_ok = rep.t_R <= rep.constant * rep.l2 + tol;
    return rep;
}

LeinertReport leinert_check(const GroupBall& ball, const std::vector<Matrix>& xs,
                            int R) {
    if (xs.empty()) throw BadParameter("need at least one coefficient");
    size_t n = xs.size();
    if (static_cast<int>(n) > ball.generators())
        throw BadParameter("more coefficients than generators");
    int m = static_cast<int>(xs[0].rows());
    for (const auto& x : xs)
        if (x.rows() != m || x.cols() != m)
            throw DimensionMismatch("coefficients must share a square size");

    LeinertReport rep;
    rep.R = R;
    Matrix colsum = Matrix::Zero(m, m), rowsum = Matrix::Zero(m, m);
    for (const auto& x : xs) {
        colsum += x.adjoint() * x;
        rowsum += x * x.adjoint();
    }
    rep.col = std::sqrt(operator_norm(colsum).value);
    rep.row = std::sqrt(operator_norm(rowsum).value);
    rep.bound = 2.0 * std::max(rep.col, rep.row);

    KronSumOp op;
    op.base_rows = ball.dim(R + 1);
    op.base_cols = ball.dim(R);
    op.s = m;
    for (size_t i = 0; i < n; ++i) {
        GroupWord g = {static_cast<int>(i) + 1};
        op.parts.push_back(KronSumOp::Part{
            std::make_shared<SparseOp>(lambda_rect(ball, g, R)), xs[i]});
    }
    rep.t_R = operator_norm(op).value;
    double tol = 1e-8 * std::max(1.0, rep.bound);
    rep.upper_ok = rep.t_R <= rep.bound + tol;
    rep.converse_ok = R < 1 || std::max(rep.col, rep.row) <= rep.t_R + tol;
    return rep;
}

Matrix radial_symbol(const GroupBall& ball, const std::vector<cxd>& f) {
    int R = ball.radius();
    if (static_cast<int>(f.size()) < 2 * R + 1)
        throw BadParameter("f must be defined on lengths 0..2R");
    std::int64_t n = ball.dim(R);
    Matrix a(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            a(i, j) = f[word_distance(ball.word_at(i), ball.word_at(j))];
    return a;
}

}  // namespace freeprod
