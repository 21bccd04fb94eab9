#include "freeprod/khintchine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace freeprod {

namespace {

// Rectangle of a single elementary tensor (letters only, unit coefficient).
SpMat represent_term(const FockPtr& fock, const std::vector<Letter>& letters,
                     int domain_L, int cap) {
    int len = static_cast<int>(letters.size());
    SpMat cur;
    int level = domain_L;
    for (int j = len - 1; j >= 0; --j) {
        int next = std::min(level + 1, cap);
        BandOperator l = represent_letter(fock, letters[j], level, next);
        cur = (j == len - 1) ? l.mat : SpMat(l.mat * cur);
        level = next;
    }
    if (len == 0) {
        cur = SpMat(fock->dim(cap), fock->dim(domain_L));
        std::vector<Triplet> t;
        for (std::int64_t c = 0; c < fock->dim(domain_L); ++c) t.emplace_back(c, c, 1.0);
        cur.setFromTriplets(t.begin(), t.end());
        return cur;
    }
    if (cur.rows() != fock->dim(cap)) {
        SpMat padded(fock->dim(cap), cur.cols());
        std::vector<Triplet> t;
        for (int c = 0; c < cur.outerSize(); ++c)
            for (SpMat::InnerIterator it(cur, c); it; ++it)
                t.emplace_back(it.row(), it.col(), it.value());
        padded.setFromTriplets(t.begin(), t.end());
        return padded;
    }
    return cur;
}

SpMat submatrix(const SpMat& a, const std::vector<std::int64_t>& rows,
                const std::vector<std::int64_t>& cols) {
    std::unordered_map<std::int64_t, std::int64_t> rowpos;
    rowpos.reserve(rows.size() * 2);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows.size()); ++i)
        rowpos[rows[i]] = i;
    std::vector<Triplet> t;
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cols.size()); ++c) {
        for (SpMat::InnerIterator it(a, cols[c]); it; ++it) {
            auto found = rowpos.find(it.row());
            if (found != rowpos.end()) t.emplace_back(found->second, c, it.value());
        }
    }
    SpMat out(rows.size(), cols.size());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

std::vector<std::int64_t> stratum_indices(const FockPtr& fock, int p) {
    std::vector<std::int64_t> idx(fock->stratum_dim(p));
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(idx.size()); ++i)
        idx[i] = fock->stratum_offset(p) + i;
    return idx;
}

int trailing_index(const FockPtr& fock, std::int64_t idx) {
    Word w = fock->word_at(idx);
    return w.empty() ? -1 : w.back().first;
}

// Words of length p whose trailing algebra index is (or is not) j.
std::vector<std::int64_t> stratum_by_trail(const FockPtr& fock, int p, int j,
                                           bool equal) {
    std::vector<std::int64_t> out;
    if (p < 0) return out;
    std::int64_t o = fock->stratum_offset(p);
    for (std::int64_t i = 0; i < fock->stratum_dim(p); ++i) {
        bool eq = trailing_index(fock, o + i) == j;
        if (eq == equal) out.push_back(o + i);
    }
    return out;
}

}  // namespace

int AmplifiedElement::degree() const {
    size_t d = 0;
    for (const auto& t : terms) d = std::max(d, t.letters.size());
    return static_cast<int>(d);
}

bool AmplifiedElement::homogeneous(int d) const {
    if (scalar.cwiseAbs().maxCoeff() > 0 && d != 0) return false;
    for (const auto& t : terms)
        if (static_cast<int>(t.letters.size()) != d) return false;
    return true;
}

AmplifiedElement AmplifiedElement::from(const FreeElement& x) {
    AmplifiedElement a;
    a.family = x.family();
    a.s = 1;
    a.scalar = Matrix::Constant(1, 1, x.scalar());
    for (const auto& t : x.terms())
        a.terms.push_back(ATerm{Matrix::Constant(1, 1, t.coeff), t.letters});
    return a;
}

AmplifiedElement AmplifiedElement::from(const FreeElement& x, int s,
                                        const std::vector<Matrix>& coeffs,
                                        const Matrix& scalar_coeff) {
    if (coeffs.size() != x.terms().size())
        throw BadParameter("need one coefficient matrix per term");
    AmplifiedElement a;
    a.family = x.family();
    a.s = s;
    a.scalar = scalar_coeff.rows() == s ? scalar_coeff : Matrix::Zero(s, s);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].rows() != s || coeffs[i].cols() != s)
            throw DimensionMismatch("coefficient must be s x s");
        a.terms.push_back(ATerm{x.terms()[i].coeff * coeffs[i], x.terms()[i].letters});
    }
    return a;
}

double IotaBlock::norm(const NormOptions& opts) const {
    if (rows == 0 || cols == 0 || parts.empty()) return 0.0;
    if (s == 1 && parts.size() == 1) {
        SpMat m = parts[0].first * parts[0].second(0, 0);
        return operator_norm(m, opts).value;
    }
    KronSumOp op;
    op.base_rows = rows;
    op.base_cols = cols;
    op.s = s;
    for (const auto& [m, c] : parts)
        op.parts.push_back(KronSumOp::Part{std::make_shared<SparseOp>(m), c});
    return operator_norm(op, opts).value;
}

Matrix IotaBlock::dense() const {
    Matrix out = Matrix::Zero(rows * s, cols * s);
    for (const auto& [m, c] : parts) {
        Matrix md = Matrix(m);
        for (std::int64_t r = 0; r < md.rows(); ++r)
            for (std::int64_t cc = 0; cc < md.cols(); ++cc)
                if (md(r, cc) != cxd(0.0))
                    out.block(r * s, cc * s, s, s) += md(r, cc) * c;
    }
    return out;
}

IotaBlocks iota(const FockPtr& fock, const AmplifiedElement& x, int d) {
    if (!x.homogeneous(d)) throw NotHomogeneous("element is not homogeneous of degree d");
    if (fock->L() < d) throw TruncationTooSmall("need fock.L >= d");
    int N = fock->num_algebras();

    // All blocks are compressions of the rectangle assembled on domain F_d
    // with codomain capped at F_d; every contributing path stays below d.
    std::vector<SpMat> term_mats;
    for (const auto& t : x.terms)
        term_mats.push_back(represent_term(fock, t.letters, d, d));

    IotaBlocks out;
    out.d = d;
    out.s = x.s;
    for (int k = 0; k <= d; ++k) {
        auto rows = stratum_indices(fock, k);
        auto cols = stratum_indices(fock, d - k);
        IotaBlock blk;
        blk.rows = rows.size();
        blk.cols = cols.size();
        blk.s = x.s;
        for (size_t t = 0; t < term_mats.size(); ++t)
            blk.parts.emplace_back(submatrix(term_mats[t], rows, cols), x.terms[t].coeff);
        out.plain.push_back(std::move(blk));
    }
    for (int k = 0; k + 1 <= d; ++k) {
        std::vector<IotaBlock> family_blocks;
        for (int j = 0; j < N; ++j) {
            // S: length d-k-1 words with trailing index != j, plus their
            // extensions by a trailing letter in Hbar_j.
            auto s_plain = stratum_by_trail(fock, d - k - 1, j, false);
            auto s_ext = stratum_by_trail(fock, d - k, j, true);
            std::vector<std::int64_t> cols = s_plain;
            cols.insert(cols.end(), s_ext.begin(), s_ext.end());
            // T: length k words with trailing index != j, plus extensions.
            auto t_plain = stratum_by_trail(fock, k, j, false);
            auto t_ext = stratum_by_trail(fock, k + 1, j, true);
            std::vector<std::int64_t> rows = t_plain;
            rows.insert(rows.end(), t_ext.begin(), t_ext.end());
            IotaBlock blk;
            blk.rows = rows.size();
            blk.cols = cols.size();
            blk.s = x.s;
            for (size_t t = 0; t < term_mats.size(); ++t)
                blk.parts.emplace_back(submatrix(term_mats[t], rows, cols),
                                       x.terms[t].coeff);
            family_blocks.push_back(std::move(blk));
        }
        out.diag.push_back(std::move(family_blocks));
    }
    return out;
}

double ed_norm(const IotaBlocks& blocks, const NormOptions& opts) {
    double best = 0.0;
    for (const auto& b : blocks.plain) best = std::max(best, b.norm(opts));
    for (const auto& fam : blocks.diag) {
        double fam_norm = 0.0;
        for (const auto& b : fam) fam_norm = std::max(fam_norm, b.norm(opts));
        best = std::max(best, fam_norm);
    }
    return best;
}

double ed_norm(const FockPtr& fock, const FreeElement& x, int d) {
    if (d == 0) return std::abs(x.scalar());
    return ed_norm(iota(fock, AmplifiedElement::from(homogeneous_part(x, d)), d));
}

NormResult truncated_norm(const FockPtr& fock, const AmplifiedElement& x, int L) {
    int d = x.degree();
    if (fock->L() < L + d) throw TruncationTooSmall("need fock.L >= L + degree");
    KronSumOp op;
    op.base_rows = fock->dim(L + d);
    op.base_cols = fock->dim(L);
    op.s = x.s;
    if (x.scalar.cwiseAbs().maxCoeff() > 0) {
        std::vector<Triplet> t;
        for (std::int64_t c = 0; c < fock->dim(L); ++c) t.emplace_back(c, c, 1.0);
        SpMat id(fock->dim(L), fock->dim(L));
        id.setFromTriplets(t.begin(), t.end());
        op.parts.push_back(KronSumOp::Part{std::make_shared<SparseOp>(id), x.scalar});
    }
    for (const auto& term : x.terms) {
        auto chain = std::make_shared<ChainOp>();
        int level = L;
        for (int j = static_cast<int>(term.letters.size()) - 1; j >= 0; --j) {
            BandOperator l = represent_letter(fock, term.letters[j], level, level + 1);
            chain->factors.push_back(std::move(l.mat));
            ++level;
        }
        op.parts.push_back(KronSumOp::Part{chain, term.coeff});
    }
    return operator_norm(op);
}

KdReport verify_kd(const FockPtr& fock, const AmplifiedElement& x, int d, int L) {
    if (L < d) throw BadParameter("need L >= d");
    KdReport r;
    r.d = d;
    r.s = x.s;
    r.L = L;
    r.constant = 2.0 * d + 1.0;
    r.alt_constant = (std::sqrt(static_cast<double>(fock->num_algebras())) + 1.0) * d + 1.0;
    r.ed = ed_norm(iota(fock, x, d));
    r.t_L = truncated_norm(fock, x, L).value;
    r.tol = 1e-8 * std::max(1.0, r.ed);
    r.ratio = r.ed > 0 ? r.t_L / r.ed : 0.0;
    r.lower_ok = r.ed <= r.t_L + r.tol;
    r.upper_ok = r.t_L <= r.constant * r.ed + r.tol;
    if (!r.pass()) {
        std::ostringstream os;
        os << "ed=" << r.ed << " t_L=" << r.t_L << " constant=" << r.constant;
        r.payload = os.str();
    }
    return r;
}

std::vector<double> stagnation_profile(const FockPtr& fock, const FreeElement& x,
                                       int n, int p_max) {
    int d = x.degree();
    int cap = std::min(fock->L(), p_max + d);
    if (fock->L() < p_max + d)
        throw TruncationTooSmall("need fock.L >= p_max + degree");
    BandOperator a = represent_element(fock, x, p_max, cap);
    std::vector<double> norms;
    for (int p = 0; p <= p_max; ++p) {
        int q = p + n;
        if (q < 0 || q > cap) {
            norms.push_back(0.0);
            continue;
        }
        auto rows = stratum_indices(fock, q);
        auto cols = stratum_indices(fock, p);
        SpMat blk = submatrix(a.mat, rows, cols);
        norms.push_back(operator_norm(blk).value);
    }
    return norms;
}

NormEnclosure enclose_norm(const FockPtr& fock, const FreeElement& x, int L) {
    int d = x.degree();
    if (fock->L() < std::max(L, d) + d)
        throw TruncationTooSmall("need fock.L >= max(L, d) + degree");
    NormEnclosure e;
    e.witness_L = L;

    NormResult low = truncated_norm(fock, AmplifiedElement::from(x), L);
    e.lower = low.value;
    e.lower_witness = low.right_singular;

    // Band route: ||x|| <= sum_n ||H_n(x)||, and the restriction norm of
    // H_n stagnates; the sup over strata is attained for p <= ceil((d-n)/2).
    BandOperator a = represent_element(fock, x, d, std::min(2 * d, fock->L()));
    e.band_route = 0.0;
    for (int n = -d; n <= d; ++n) {
        int p_bound = std::max(0, (d - n + 1) / 2);  // ceil((d-n)/2)
        double best = 0.0;
        for (int p = 0; p <= std::min(p_bound, d); ++p) {
            int q = p + n;
            if (q < 0 || q > a.codomain_L) continue;
            auto rows = stratum_indices(fock, q);
            auto cols = stratum_indices(fock, p);
            SpMat blk = submatrix(a.mat, rows, cols);
            best = std::max(best, operator_norm(blk).value);
        }
        e.band_norms.push_back(best);
        e.band_restriction.push_back(p_bound);
        e.band_route += best;
    }

    e.khintchine_route = 0.0;
    for (int deg = 0; deg <= d; ++deg) {
        double term = (2.0 * deg + 1.0) * ed_norm(fock, x, deg);
        e.khintchine_terms.push_back(term);
        e.khintchine_route += term;
    }
    e.upper = std::min(e.band_route, e.khintchine_route);
    return e;
}

ProjectionReport verify_projection_bounds(const FockPtr& fock, const FreeElement& x,
                                          int d, int L) {
    ProjectionReport r;
    r.d = d;
    r.qd_constant = 2.0 * d + 1.0;
    r.pd_constant = std::max(4.0 * d, 1.0);
    NormEnclosure full = enclose_norm(fock, x, L);
    r.upper_x = full.upper;
    r.lower_qd = truncated_norm(fock, AmplifiedElement::from(truncate_degree(x, d)), L).value;
    r.lower_pd = truncated_norm(fock, AmplifiedElement::from(homogeneous_part(x, d)), L).value;
    double tol = 1e-8 * std::max(1.0, r.upper_x);
    r.qd_ok = r.lower_qd <= r.qd_constant * r.upper_x + tol;
    r.pd_ok = r.lower_pd <= r.pd_constant * r.upper_x + tol;
    return r;
}

SpMat factdec_sum(const FockPtr& fock, const FreeElement& x, int domain_L) {
    int dmax = x.degree();
    if (fock->L() < domain_L + dmax)
        throw TruncationTooSmall("need fock.L >= domain_L + degree");
    std::int64_t nrows = fock->dim(domain_L + dmax);
    std::int64_t ncols = fock->dim(domain_L);
    SpMat acc(nrows, ncols);

    if (std::abs(x.scalar()) > 0) {
        std::vector<Triplet> t;
        for (std::int64_t c = 0; c < ncols; ++c) t.emplace_back(c, c, x.scalar());
        SpMat s(nrows, ncols);
        s.setFromTriplets(t.begin(), t.end());
        acc += s;
    }

    for (const auto& term : x.terms()) {
        int len = static_cast<int>(term.letters.size());
        // pattern: for each factor position j (1-based from the left),
        // 0 = P a Pperp (creation type), 1 = Pperp a P (annihilation type),
        // 2 = P a P (diagonal).
        auto apply_pattern = [&](const std::vector<int>& pattern) {
            SpMat cur;
            int level = domain_L;
            for (int j = len - 1; j >= 0; --j) {
                const Letter& l = term.letters[j];
                BandOperator rect = represent_letter(fock, l, level, level + 1);
                Eigen::VectorXd pk_dom = projection_Pk(fock, l.algebra, level);
                Eigen::VectorXd pk_cod = projection_Pk(fock, l.algebra, level + 1);
                Eigen::VectorXd ones_dom = Eigen::VectorXd::Ones(fock->dim(level));
                Eigen::VectorXd ones_cod = Eigen::VectorXd::Ones(fock->dim(level + 1));
                SpMat f;
                if (pattern[j] == 0)
                    f = scale_rows(scale_cols(rect.mat, ones_dom - pk_dom), pk_cod);
                else if (pattern[j] == 1)
                    f = scale_rows(scale_cols(rect.mat, pk_dom), ones_cod - pk_cod);
                else
                    f = scale_rows(scale_cols(rect.mat, pk_dom), pk_cod);
                cur = (j == len - 1) ? f : SpMat(f * cur);
                ++level;
            }
            return cur;
        };

        SpMat term_sum(fock->dim(domain_L + len), ncols);
        for (int k = 0; k <= len; ++k) {
            std::vector<int> pattern(len, 1);
            for (int j = 0; j < k; ++j) pattern[j] = 0;
            term_sum += apply_pattern(pattern);
        }
        for (int k = 0; k + 1 <= len; ++k) {
            std::vector<int> pattern(len, 1);
            for (int j = 0; j < k; ++j) pattern[j] = 0;
            pattern[k] = 2;
            term_sum += apply_pattern(pattern);
        }

        if (term_sum.rows() != nrows) {
            std::vector<Triplet> t;
            for (int c = 0; c < term_sum.outerSize(); ++c)
                for (SpMat::InnerIterator it(term_sum, c); it; ++it)
                    t.emplace_back(it.row(), it.col(), it.value());
            SpMat padded(nrows, ncols);
            padded.setFromTriplets(t.begin(), t.end());
            term_sum = std::move(padded);
        }
        acc += SpMat(term_sum * term.coeff);
    }
    return acc;
}

}  // namespace freeprod
