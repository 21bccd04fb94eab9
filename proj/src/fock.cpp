#include "freeprod/fock.hpp"

#include <algorithm>
#include <cmath>

namespace freeprod {

FockSpace::FockSpace(FamilyPtr family, int L) : family_(std::move(family)), L_(L) {
    if (L_ < 0) throw BadParameter("truncation length must be nonnegative");
    int N = family_->size();
    if (N == 0) throw BadParameter("empty algebra family");
    for (int i = 0; i < N; ++i) letter_dims_.push_back(family_->at(i).hbar_dim());

    // suffix_[q][prev+1] = weighted count of admissible words of length q
    // whose first index differs from prev (prev = -1: unconstrained).
    suffix_.assign(L_ + 1, std::vector<std::int64_t>(N + 1, 0));
    for (int p = 0; p <= N; ++p) suffix_[0][p] = 1;
    for (int q = 1; q <= L_; ++q)
        for (int prev = -1; prev < N; ++prev) {
            std::int64_t s = 0;
            for (int i = 0; i < N; ++i)
                if (i != prev) s += letter_dims_[i] * suffix_[q - 1][i + 1];
            suffix_[q][prev + 1] = s;
        }

    offsets_.assign(L_ + 2, 0);
    for (int p = 0; p <= L_; ++p) offsets_[p + 1] = offsets_[p] + suffix_[p][0];
}

std::int64_t FockSpace::stratum_dim(int p) const {
    if (p < 0 || p > L_) return 0;
    return suffix_[p][0];
}

std::int64_t FockSpace::stratum_offset(int p) const { return offsets_.at(p); }

std::int64_t FockSpace::dim(int level) const {
    if (level < 0) return 0;
    if (level > L_) throw TruncationTooSmall("level exceeds Fock truncation");
    return offsets_[level + 1];
}

std::int64_t FockSpace::index_of(const Word& w) const {
    int p = static_cast<int>(w.size());
    if (p > L_) throw TruncationTooSmall("word longer than truncation");
    std::int64_t r = 0;
    std::int64_t prefmult = 1;
    int prev = -1;
    for (int j = 0; j < p; ++j) {
        int ij = w[j].first;
        for (int i = 0; i < ij; ++i)
            if (i != prev) r += prefmult * letter_dims_[i] * suffix_[p - j - 1][i + 1];
        prefmult *= letter_dims_[ij];
        prev = ij;
    }
    // basis-element tuple, e_1 major
    std::int64_t place = 1;
    for (int j = p - 1; j >= 0; --j) {
        r += w[j].second * place;
        place *= letter_dims_[w[j].first];
    }
    return offsets_[p] + r;
}

Word FockSpace::word_at(std::int64_t idx) const {
    int p = length_of(idx);
    std::int64_t r = idx - offsets_[p];
    Word w(p);
    std::int64_t prefmult = 1;
    int prev = -1;
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < num_algebras(); ++i) {
            if (i == prev) continue;
            std::int64_t blk = prefmult * letter_dims_[i] * suffix_[p - j - 1][i + 1];
            if (r < blk) { w[j].first = i; break; }
            r -= blk;
        }
        prefmult *= letter_dims_[w[j].first];
        prev = w[j].first;
    }
    for (int j = p - 1; j >= 0; --j) {
        int m = letter_dims_[w[j].first];
        w[j].second = static_cast<int>(r % m);
        r /= m;
    }
    return w;
}

int FockSpace::length_of(std::int64_t idx) const {
    int p = static_cast<int>(std::upper_bound(offsets_.begin(), offsets_.end(), idx) -
                             offsets_.begin()) - 1;
    return p;
}

FockPtr make_fock(FamilyPtr family, int L) {
    return std::make_shared<const FockSpace>(std::move(family), L);
}

Matrix BandOperator::block(int q, int p) const {
    std::int64_t r0 = fock->stratum_offset(q), rn = fock->stratum_dim(q);
    std::int64_t c0 = fock->stratum_offset(p), cn = fock->stratum_dim(p);
    Matrix out = Matrix::Zero(rn, cn);
    for (std::int64_t c = c0; c < c0 + cn; ++c)
        for (SpMat::InnerIterator it(mat, c); it; ++it)
            if (it.row() >= r0 && it.row() < r0 + rn)
                out(it.row() - r0, c - c0) = it.value();
    return out;
}

BandOperator represent_letter(const FockPtr& fock, const Letter& letter,
                              int domain_L, int codomain_cap) {
    const auto& fam = *fock->family();
    const auto& alg = fam.at(letter.algebra);
    if (std::abs(alg.state(letter.matrix)) > kEpsCenter)
        throw BadParameter("letter is not centered");
    if (codomain_cap < 0) codomain_cap = domain_L + 1;
    if (codomain_cap > fock->L())
        throw TruncationTooSmall("codomain exceeds Fock truncation");
    if (domain_L > fock->L())
        throw TruncationTooSmall("domain exceeds Fock truncation");

    int i = letter.algebra;
    int m = alg.hbar_dim();
    // creation coefficients: hat(a) in hbar basis
    Vector create = alg.hbar_coords(letter.matrix);
    // per basis element e: a*e expanded as ann coeff + hbar coords
    std::vector<cxd> ann(m);
    std::vector<Vector> diag(m);
    for (int e = 0; e < m; ++e) {
        Matrix v = letter.matrix * alg.hbar_basis()[e];
        ann[e] = alg.state(v);
        diag[e] = alg.hbar_coords(v);
    }

    std::vector<Triplet> trips;
    std::int64_t ncols = fock->dim(domain_L);
    for (std::int64_t c = 0; c < ncols; ++c) {
        Word w = fock->word_at(c);
        int p = static_cast<int>(w.size());
        if (w.empty() || w[0].first != i) {
            if (p + 1 <= codomain_cap) {
                Word nw(1 + w.size());
                std::copy(w.begin(), w.end(), nw.begin() + 1);
                for (int k = 0; k < m; ++k) {
                    if (std::abs(create(k)) < 1e-16) continue;
                    nw[0] = {i, k};
                    trips.emplace_back(fock->index_of(nw), c, create(k));
                }
            }
        } else {
            int e = w[0].second;
            if (std::abs(ann[e]) > 1e-16) {
                Word nw(w.begin() + 1, w.end());
                trips.emplace_back(fock->index_of(nw), c, ann[e]);
            }
            Word nw = w;
            for (int k = 0; k < m; ++k) {
                if (std::abs(diag[e](k)) < 1e-16) continue;
                nw[0] = {i, k};
                trips.emplace_back(fock->index_of(nw), c, diag[e](k));
            }
        }
    }
    BandOperator op;
    op.fock = fock;
    op.domain_L = domain_L;
    op.codomain_L = codomain_cap;
    op.degree = 1;
    op.mat = SpMat(fock->dim(codomain_cap), ncols);
    op.mat.setFromTriplets(trips.begin(), trips.end());
    return op;
}

BandOperator represent_element(const FockPtr& fock, const FreeElement& x,
                               int domain_L, int codomain_cap) {
    int d = x.degree();
    if (codomain_cap < 0) codomain_cap = domain_L + d;
    if (codomain_cap > fock->L() || domain_L > fock->L())
        throw TruncationTooSmall("window exceeds Fock truncation");

    std::int64_t nrows = fock->dim(codomain_cap);
    std::int64_t ncols = fock->dim(domain_L);
    SpMat acc(nrows, ncols);
    if (std::abs(x.scalar()) > 0) {
        std::vector<Triplet> id;
        for (std::int64_t c = 0; c < ncols; ++c) id.emplace_back(c, c, x.scalar());
        SpMat s(nrows, ncols);
        s.setFromTriplets(id.begin(), id.end());
        acc += s;
    }
    for (const auto& term : x.terms()) {
        // apply letters right to left with expanding (capped) codomains
        int len = static_cast<int>(term.letters.size());
        SpMat cur;
        int level = domain_L;
        for (int j = len - 1; j >= 0; --j) {
            int next = std::min(level + 1, codomain_cap);
            BandOperator l = represent_letter(fock, term.letters[j], level, next);
            cur = (j == len - 1) ? l.mat : SpMat(l.mat * cur);
            level = next;
        }
        SpMat padded(nrows, ncols);
        if (cur.rows() == nrows) {
            padded = cur;
        } else {
            std::vector<Triplet> t;
            for (int c = 0; c < cur.outerSize(); ++c)
                for (SpMat::InnerIterator it(cur, c); it; ++it)
                    t.emplace_back(it.row(), it.col(), it.value());
            padded.setFromTriplets(t.begin(), t.end());
        }
        acc += SpMat(padded * term.coeff);
    }
    BandOperator op;
    op.fock = fock;
    op.domain_L = domain_L;
    op.codomain_L = codomain_cap;
    op.degree = d;
    op.mat = std::move(acc);
    op.mat.prune([](auto, auto, const cxd& v) { return std::abs(v) > 0.0; });
    return op;
}

Eigen::VectorXd projection_Pk(const FockPtr& fock, int k, int level) {
    if (k < 0 || k >= fock->num_algebras()) throw BadParameter("algebra index");
    std::int64_t n = fock->dim(level);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = 1; i < n; ++i) {
        Word w = fock->word_at(i);
        if (w[0].first == k) diag(i) = 1.0;
    }
    return diag;
}

Eigen::VectorXd length_projection(const FockPtr& fock, int p, int level) {
    std::int64_t n = fock->dim(level);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    if (p >= 0 && p <= level) {
        std::int64_t o = fock->stratum_offset(p);
        for (std::int64_t i = 0; i < fock->stratum_dim(p); ++i) diag(o + i) = 1.0;
    }
    return diag;
}

Vector apply_Uz(const FockPtr& fock, cxd z, int level) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
        throw NotUnimodular("|z| must be 1");
    std::int64_t n = fock->dim(level);
    Vector diag(n);
    for (int p = 0; p <= level; ++p) {
        cxd zp = std::pow(z, p);
        std::int64_t o = fock->stratum_offset(p);
        for (std::int64_t i = 0; i < fock->stratum_dim(p); ++i) diag(o + i) = zp;
    }
    return diag;
}

BandOperator band_component(const BandOperator& op, int n) {
    if (std::abs(n) > op.degree) throw DegreeOutOfRange("|n| exceeds band degree");
    BandOperator out = op;
    std::vector<Triplet> trips;
    for (int c = 0; c < op.mat.outerSize(); ++c) {
        int pc = op.fock->length_of(c);
        for (SpMat::InnerIterator it(op.mat, c); it; ++it)
            if (op.fock->length_of(it.row()) - pc == n)
                trips.emplace_back(it.row(), it.col(), it.value());
    }
    out.mat = SpMat(op.mat.rows(), op.mat.cols());
    out.mat.setFromTriplets(trips.begin(), trips.end());
    return out;
}

BandOperator band_component_fourier(const BandOperator& op, int n) {
    if (std::abs(n) > op.degree) throw DegreeOutOfRange("|n| exceeds band degree");
    int M = 2 * op.degree + 1;
    cxd omega = std::polar(1.0, 2.0 * M_PI / M);
    SpMat acc(op.mat.rows(), op.mat.cols());
    for (int k = 0; k < M; ++k) {
        cxd zk = std::pow(omega, k);
        Vector dz = apply_Uz(op.fock, zk, op.domain_L);
        Vector cz = apply_Uz(op.fock, zk, op.codomain_L);
        // U_z^* a U_z scaled by omega^{k n}
        SpMat term = op.mat;
        for (int c = 0; c < term.outerSize(); ++c)
            for (SpMat::InnerIterator it(term, c); it; ++it)
                it.valueRef() *= std::conj(cz(it.row())) * dz(it.col());
        acc += SpMat(term * (std::pow(omega, k * n) / static_cast<double>(M)));
    }
    BandOperator out = op;
    out.mat = std::move(acc);
    return out;
}

SpMat scale_rows(const SpMat& m, const Eigen::VectorXd& diag) {
    SpMat out = m;
    for (int c = 0; c < out.outerSize(); ++c)
        for (SpMat::InnerIterator it(out, c); it; ++it)
            it.valueRef() *= diag(it.row());
    out.prune([](auto, auto, const cxd& v) { return std::abs(v) > 0.0; });
    return out;
}

SpMat scale_cols(const SpMat& m, const Eigen::VectorXd& diag) {
    SpMat out = m;
    for (int c = 0; c < out.outerSize(); ++c)
        for (SpMat::InnerIterator it(out, c); it; ++it)
            it.valueRef() *= diag(it.col());
    out.prune([](auto, auto, const cxd& v) { return std::abs(v) > 0.0; });
    return out;
}

}  // namespace freeprod
