#include "freeprod/free_element.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace freeprod {

namespace {

constexpr double kPruneTol = 1e-14;
constexpr double kMergeTol = 1e-12;

void check_family(const FamilyPtr& a, const FamilyPtr& b) {
    if (a == b) return;
    if (!a || !b || a->size() != b->size())
        throw FamilyMismatch("operands over different algebra families");
    for (int i = 0; i < a->size(); ++i)
        if (a->at(i).n() != b->at(i).n())
            throw FamilyMismatch("operands over different algebra families");
}

// Detects b = lambda * a entrywise within kMergeTol; returns lambda.
std::optional<cxd> proportionality(const Matrix& a, const Matrix& b) {
    int r = 0, c = 0;
    double best = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > best) { best = std::abs(a(i, j)); r = i; c = j; }
    if (best < kMergeTol) return std::nullopt;
    cxd lambda = b(r, c) / a(r, c);
    double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - lambda * a).cwiseAbs().maxCoeff() > kMergeTol * scale)
        return std::nullopt;
    return lambda;
}

}  // namespace

FreeElement FreeElement::letter_element(const FamilyPtr& family, int algebra,
                                        const Matrix& a, cxd coeff) {
    if (algebra < 0 || algebra >= family->size())
        throw BadParameter("algebra index out of range");
    Letter l = family->at(algebra).center(a);
    l.algebra = algebra;
    FreeElement x(family);
    x.terms_.push_back(Term{coeff, {std::move(l)}});
    x.canonicalize();
    return x;
}

FreeElement FreeElement::from_terms(FamilyPtr family, cxd scalar,
                                    std::vector<Term> terms) {
    FreeElement x(std::move(family), scalar);
    for (auto& t : terms) {
        for (size_t j = 0; j < t.letters.size(); ++j) {
            const Letter& l = t.letters[j];
            if (l.algebra < 0 || l.algebra >= x.family_->size())
                throw BadParameter("algebra index out of range");
            const auto& alg = x.family_->at(l.algebra);
            if (l.matrix.rows() != alg.n() || l.matrix.cols() != alg.n())
                throw DimensionMismatch("letter matrix has wrong size");
            if (std::abs(alg.state(l.matrix)) > kEpsCenter)
                throw BadParameter("letter is not centered");
            if (j > 0 && t.letters[j - 1].algebra == l.algebra)
                throw BadParameter("consecutive algebra indices must differ");
        }
    }
    x.terms_ = std::move(terms);
    x.canonicalize();
    return x;
}

int FreeElement::degree() const {
    size_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.letters.size());
    return static_cast<int>(d);
}

void FreeElement::canonicalize() {
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (std::abs(t.coeff) < kPruneTol) continue;
        bool folded = false;
        for (auto& m : merged) {
            if (m.letters.size() != t.letters.size()) continue;
            cxd factor = 1.0;
            bool match = true;
            for (size_t j = 0; j < t.letters.size(); ++j) {
                if (m.letters[j].algebra != t.letters[j].algebra) { match = false; break; }
                auto lambda = proportionality(m.letters[j].matrix, t.letters[j].matrix);
                if (!lambda) { match = false; break; }
                factor *= *lambda;
            }
            if (match) {
                m.coeff += t.coeff * factor;
                folded = true;
                break;
            }
        }
        if (!folded) merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return std::abs(t.coeff) < kPruneTol; }),
                 merged.end());
    terms_ = std::move(merged);
}

FreeElement FreeElement::operator+(const FreeElement& other) const {
    check_family(family_, other.family_);
    FreeElement r(family_, scalar_ + other.scalar_);
    r.terms_ = terms_;
    r.terms_.insert(r.terms_.end(), other.terms_.begin(), other.terms_.end());
    r.canonicalize();
    return r;
}

FreeElement FreeElement::operator-(const FreeElement& other) const {
    return *this + other * cxd(-1.0, 0.0);
}

FreeElement FreeElement::operator*(cxd c) const {
    FreeElement r(family_, scalar_ * c);
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.coeff *= c;
    r.canonicalize();
    return r;
}

namespace {

// Concatenates two alternating letter sequences, reducing at the junction:
// ab = (ab - phi(ab) 1) + phi(ab) 1, recursing on the collapsed part.
void concat_reduce(const FamilyPtr& fam, cxd coeff,
                   std::vector<Letter> left, const std::vector<Letter>& right,
                   size_t right_from, std::vector<FreeElement::Term>& out, cxd& scalar_out) {
    size_t j = right_from;
    std::vector<Letter> cur = std::move(left);
    for (; j < right.size(); ++j) {
        if (cur.empty() || cur.back().algebra != right[j].algebra) {
            cur.push_back(right[j]);
            continue;
        }
        // junction in the same algebra: split product into centered + scalar
        const auto& alg = fam->at(right[j].algebra);
        Matrix prod = cur.back().matrix * right[j].matrix;
        cxd phi = alg.state(prod);
        Matrix centered = prod - phi * Matrix::Identity(alg.n(), alg.n());
        std::vector<Letter> shorter(cur.begin(), cur.end() - 1);
        if (centered.cwiseAbs().maxCoeff() > kPruneTol) {
            std::vector<Letter> with_centered = shorter;
            with_centered.push_back(Letter{right[j].algebra, centered});
            concat_reduce(fam, coeff, std::move(with_centered), right, j + 1, out, scalar_out);
        }
        if (std::abs(phi) > kPruneTol)
            concat_reduce(fam, coeff * phi, std::move(shorter), right, j + 1, out, scalar_out);
        return;
    }
    if (cur.empty())
        scalar_out += coeff;
    else
        out.push_back(FreeElement::Term{coeff, std::move(cur)});
}

}  // namespace

FreeElement multiply(const FreeElement& x, const FreeElement& y) {
    check_family(x.family(), y.family());
    FreeElement r(x.family(), x.scalar() * y.scalar());
    std::vector<FreeElement::Term> terms;
    cxd scalar = x.scalar() * y.scalar();
    for (const auto& t : x.terms()) {
        if (std::abs(y.scalar()) > 0)
            terms.push_back(FreeElement::Term{t.coeff * y.scalar(), t.letters});
    }
    for (const auto& t : y.terms()) {
        if (std::abs(x.scalar()) > 0)
            terms.push_back(FreeElement::Term{t.coeff * x.scalar(), t.letters});
    }
    for (const auto& a : x.terms())
        for (const auto& b : y.terms())
            concat_reduce(x.family(), a.coeff * b.coeff, a.letters, b.letters, 0,
                          terms, scalar);
    return FreeElement::from_terms(x.family(), scalar, std::move(terms));
}

cxd free_state(const FreeElement& x) { return x.scalar(); }

FreeElement homogeneous_part(const FreeElement& x, int d) {
    if (d < 0) throw BadParameter("degree must be nonnegative");
    FreeElement r(x.family(), d == 0 ? x.scalar() : cxd(0.0));
    std::vector<FreeElement::Term> kept;
    for (const auto& t : x.terms())
        if (static_cast<int>(t.letters.size()) == d) kept.push_back(t);
    return FreeElement::from_terms(x.family(), r.scalar(), std::move(kept));
}

FreeElement truncate_degree(const FreeElement& x, int d) {
    if (d < 0) throw BadParameter("degree must be nonnegative");
    std::vector<FreeElement::Term> kept;
    for (const auto& t : x.terms())
        if (static_cast<int>(t.letters.size()) <= d) kept.push_back(t);
    return FreeElement::from_terms(x.family(), x.scalar(), std::move(kept));
}

FreeElement adjoint(const FreeElement& x) {
    std::vector<FreeElement::Term> terms;
    for (const auto& t : x.terms()) {
        std::vector<Letter> rev;
        for (auto it = t.letters.rbegin(); it != t.letters.rend(); ++it)
            rev.push_back(Letter{it->algebra, it->matrix.adjoint()});
        terms.push_back(FreeElement::Term{std::conj(t.coeff), std::move(rev)});
    }
    return FreeElement::from_terms(x.family(), std::conj(x.scalar()), std::move(terms));
}

StatePreservingMap::StatePreservingMap(FamilyPtr family, std::vector<Matrix> vec_maps)
    : family_(std::move(family)), vec_maps_(std::move(vec_maps)) {
    if (static_cast<int>(vec_maps_.size()) != family_->size())
        throw BadParameter("need one map per algebra");
    cp_certified_ = true;
    for (int i = 0; i < family_->size(); ++i) {
        const auto& alg = family_->at(i);
        int n = alg.n();
        if (vec_maps_[i].rows() != n * n || vec_maps_[i].cols() != n * n)
            throw DimensionMismatch("vec map must be n^2 x n^2");
        Matrix id = Matrix::Identity(n, n);
        if ((apply(i, id) - id).cwiseAbs().maxCoeff() > 1e-10)
            throw NotStatePreserving("map is not unital");
        // phi o T = phi on matrix units
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                Matrix e = Matrix::Zero(n, n);
                e(r, c) = 1.0;
                if (std::abs(alg.state(apply(i, e)) - alg.state(e)) > 1e-10)
                    throw NotStatePreserving("map does not preserve the state");
            }
        // Choi matrix of T_i: sum E_rc (x) T(E_rc)
        Matrix choi = Matrix::Zero(n * n, n * n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                Matrix e = Matrix::Zero(n, n);
                e(r, c) = 1.0;
                Matrix te = apply(i, e);
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        choi(r * n + p, c * n + q) += te(p, q);
            }
        Eigen::SelfAdjointEigenSolver<Matrix> es((choi + choi.adjoint()) / 2.0);
        double min_eig = es.eigenvalues().minCoeff();
        choi_min_eigs_.push_back(min_eig);
        if (min_eig < -1e-10) cp_certified_ = false;
    }
}

Matrix StatePreservingMap::apply(int algebra, const Matrix& a) const {
    int n = family_->at(algebra).n();
    Vector v(n * n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) v(c * n + r) = a(r, c);
    Vector w = vec_maps_[algebra] * v;
    Matrix out(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) out(r, c) = w(c * n + r);
    return out;
}

StatePreservingMap StatePreservingMap::identity(const FamilyPtr& family) {
    std::vector<Matrix> maps;
    for (int i = 0; i < family->size(); ++i) {
        int n = family->at(i).n();
        maps.push_back(Matrix::Identity(n * n, n * n));
    }
    return StatePreservingMap(family, std::move(maps));
}

StatePreservingMap StatePreservingMap::interpolation_with_state(const FamilyPtr& family,
                                                                double r) {
    if (r < 0.0 || r > 1.0) throw BadParameter("r must be in [0,1]");
    std::vector<Matrix> maps;
    for (int i = 0; i < family->size(); ++i) {
        const auto& alg = family->at(i);
        int n = alg.n();
        Matrix m = Matrix::Zero(n * n, n * n);
        for (int c = 0; c < n; ++c)
            for (int rr = 0; rr < n; ++rr) {
                Matrix e = Matrix::Zero(n, n);
                e(rr, c) = 1.0;
                Matrix te = r * e + (1.0 - r) * alg.state(e) * Matrix::Identity(n, n);
                for (int cc = 0; cc < n; ++cc)
                    for (int r2 = 0; r2 < n; ++r2)
                        m(cc * n + r2, c * n + rr) = te(r2, cc);
            }
        maps.push_back(std::move(m));
    }
    return StatePreservingMap(family, std::move(maps));
}

StatePreservingMap StatePreservingMap::state_projection(const FamilyPtr& family) {
    return interpolation_with_state(family, 0.0);
}

FreeElement bd_free_product_map(const StatePreservingMap& t, const FreeElement& x) {
    std::vector<FreeElement::Term> terms;
    for (const auto& term : x.terms()) {
        std::vector<Letter> mapped;
        bool dead = false;
        for (const auto& l : term.letters) {
            Matrix m = t.apply(l.algebra, l.matrix);
            if (m.cwiseAbs().maxCoeff() < 1e-300) { dead = true; break; }
            mapped.push_back(Letter{l.algebra, std::move(m)});
        }
        if (!dead) terms.push_back(FreeElement::Term{term.coeff, std::move(mapped)});
    }
    return FreeElement::from_terms(x.family(), x.scalar(), std::move(terms));
}

FreeElement poisson(const FreeElement& x, double r) {
    if (r < 0.0 || r >= 1.0) throw BadParameter("r must be in [0,1)");
    std::vector<FreeElement::Term> terms;
    for (const auto& t : x.terms()) {
        double f = std::pow(r, static_cast<double>(t.letters.size()));
        terms.push_back(FreeElement::Term{t.coeff * f, t.letters});
    }
    return FreeElement::from_terms(x.family(), x.scalar(), std::move(terms));
}

double truncated_poisson_bound(double r, int n) {
    if (n == 0) return 1.0;
    return 1.0 + 4.0 * n * std::pow(r, n) / ((1.0 - r) * (1.0 - r));
}

TruncatedPoisson poisson_truncated(const FreeElement& x, double r, int n) {
    if (r < 0.0 || r >= 1.0) throw BadParameter("r must be in [0,1)");
    if (n < 0) throw BadParameter("n must be nonnegative");
    FreeElement y = truncate_degree(poisson(x, r), n);
    return TruncatedPoisson{std::move(y), truncated_poisson_bound(r, n), r, n};
}

TruncatedPoisson poisson_tn(const FreeElement& x, int n) {
    if (n < 1) throw BadParameter("n must be positive");
    double r = 1.0 - 1.0 / std::sqrt(static_cast<double>(n));
    return poisson_truncated(x, r, n);
}

}  // namespace freeprod
