#include <doctest.h>

#include <random>

#include "freeprod/fock.hpp"
#include "freeprod/khintchine.hpp"
#include "freeprod/linop.hpp"

using namespace freeprod;

namespace {

FreeElement bernoulli_letter(const FamilyPtr& fam, int i) {
    return FreeElement::letter_element(fam, i, bernoulli_symbol());
}

Matrix dense(const SpMat& m) { return Matrix(m); }

FreeElement random_element(const FamilyPtr& fam, int degree, std::uint64_t seed,
                           bool homogeneous = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<FreeElement::Term> terms;
    int lo = homogeneous ? degree : 1;
    for (int d = lo; d <= degree; ++d) {
        std::vector<Letter> letters;
        std::uniform_int_distribution<int> pick(0, fam->size() - 1);
        int prev = -1;
        for (int j = 0; j < d; ++j) {
            int idx;
            do { idx = pick(rng); } while (idx == prev);
            Matrix m(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) m(r, c) = cxd(g(rng), g(rng));
            Letter l = fam->at(idx).center(m);
            l.algebra = idx;
            letters.push_back(l);
            prev = idx;
        }
        terms.push_back(FreeElement::Term{cxd(g(rng), g(rng)), letters});
    }
    cxd scalar = homogeneous ? cxd(0.0) : cxd(g(rng), g(rng));
    return FreeElement::from_terms(fam, scalar, terms);
}

}  // namespace

TEST_CASE("fock dimensions and indexing") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 3);
    // 1 + 2*3 + 2*9 + 2*27 = 79
    CHECK(fock->dim() == 79);
    CHECK(fock->stratum_dim(0) == 1);
    CHECK(fock->stratum_dim(1) == 6);
    CHECK(fock->stratum_dim(2) == 18);
    CHECK(fock->stratum_dim(3) == 54);
    for (std::int64_t i = 0; i < fock->dim(); ++i) {
        Word w = fock->word_at(i);
        CHECK(fock->index_of(w) == i);
        for (size_t j = 1; j < w.size(); ++j) CHECK(w[j].first != w[j - 1].first);
    }
}

TEST_CASE("fock dimensions for three algebras") {
    FockPtr fock = make_fock(bernoulli_family(3), 2);
    CHECK(fock->stratum_dim(1) == 9);
    CHECK(fock->stratum_dim(2) == 54);
    for (std::int64_t i = 0; i < fock->dim(); ++i)
        CHECK(fock->index_of(fock->word_at(i)) == i);
}

TEST_CASE("single algebra words stop at length 1") {
    FockPtr fock = make_fock(bernoulli_family(1), 3);
    CHECK(fock->stratum_dim(1) == 3);
    CHECK(fock->stratum_dim(2) == 0);
}

TEST_CASE("bernoulli letter action on the vacuum and back") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 3);
    Letter u{0, bernoulli_symbol()};
    BandOperator op = represent_letter(fock, u, 1);

    // u * Omega = hat(u): the coordinates of u in the hbar basis
    Vector cu = fam->at(0).hbar_coords(bernoulli_symbol());
    Matrix col = dense(op.mat).col(0);
    int nonzero = 0;
    for (int i = 0; i < col.size(); ++i)
        if (std::abs(col(i)) > 1e-14) ++nonzero;
    CHECK(nonzero == 1);
    // locate hat(u) among length-1 words of algebra 0
    bool found = false;
    for (int e = 0; e < 3; ++e) {
        Word w = {{0, e}};
        cxd v = col(fock->index_of(w));
        if (std::abs(v) > 1e-14) {
            CHECK(std::abs(v - cu(e)) < 1e-14);
            found = true;
        }
    }
    CHECK(found);

    // u * hat(u) = Omega: diagonal part vanishes, annihilation coefficient 1
    Vector hatu = Vector::Zero(fock->dim(1));
    for (int e = 0; e < 3; ++e) hatu(fock->index_of({{0, e}})) = cu(e);
    BandOperator op1 = represent_letter(fock, u, 1);
    Vector out = op1.mat * hatu;
    CHECK(std::abs(out(0) - 1.0) < 1e-13);
    CHECK((out.tail(out.size() - 1)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("letter action matches the gns oracle on length-1 words") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 2);
    Matrix a(2, 2), b(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) { a(r, c) = cxd(g(rng), g(rng)); b(r, c) = cxd(g(rng), g(rng)); }
    Letter la = fam->at(0).center(a);
    la.algebra = 0;
    BandOperator op = represent_letter(fock, la, 1);

    // same-algebra length-1 word hat(b)
    Vector hb = fam->at(0).hbar_coords(b);
    Vector in = Vector::Zero(fock->dim(1));
    for (int e = 0; e < 3; ++e) in(fock->index_of({{0, e}})) = hb(e);
    Vector out = op.mat * in;

    // oracle: gns multiplication of the centered letter on hat-coords of b
    Matrix gns = fam->at(0).gns_left_mult(la.matrix);
    Vector coords = Vector::Zero(4);
    coords.tail(3) = hb;
    Vector expect = gns * coords;
    CHECK(std::abs(out(0) - expect(0)) < 1e-12);
    for (int e = 0; e < 3; ++e)
        CHECK(std::abs(out(fock->index_of({{0, e}})) - expect(e + 1)) < 1e-12);
}

TEST_CASE("scalar element is the rectangular identity") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 3);
    FreeElement one = FreeElement::scalar_element(fam, 1.0);
    BandOperator op = represent_element(fock, one, 2, 3);
    Matrix m = dense(op.mat);
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            CHECK(std::abs(m(r, c) - (r == c ? 1.0 : 0.0)) < 1e-15);
}

TEST_CASE("u1 (x) u2 has orthonormal columns") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 5);
    FreeElement w = multiply(bernoulli_letter(fam, 0), bernoulli_letter(fam, 1));
    for (int L = 0; L <= 3; ++L) {
        BandOperator op = represent_element(fock, w, L);
        NormResult n = operator_norm(op.mat);
        CHECK(n.value == doctest::Approx(1.0).epsilon(1e-10));
    }
}

// Independent brute-force oracle: on the Bernoulli sub-dynamics the window
// F_3 -> F_4 of u1 + u2 is the 9-vertex path adjacency restricted to the
// middle 7 columns; its top singular value is 2 cos(pi/10). The square
// 7x7 compression gives 2 cos(pi/8) instead.
TEST_CASE("u1 + u2 window norm at L=3 (brute force oracle)") {
    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(9, 9);
    for (int i = 0; i + 1 < 9; ++i) path(i, i + 1) = path(i + 1, i) = 1.0;
    Eigen::MatrixXd rect = path.block(0, 1, 9, 7);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rect);
    double oracle_rect = svd.singularValues()(0);
    CHECK(oracle_rect == doctest::Approx(2.0 * std::cos(M_PI / 10)).epsilon(1e-12));
    Eigen::MatrixXd square = path.block(1, 1, 7, 7);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(square);
    CHECK(svd2.singularValues()(0) ==
          doctest::Approx(2.0 * std::cos(M_PI / 8)).epsilon(1e-12));

    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 4);
    FreeElement x = bernoulli_letter(fam, 0) + bernoulli_letter(fam, 1);
    BandOperator op = represent_element(fock, x, 3);
    CHECK(operator_norm(op.mat).value == doctest::Approx(oracle_rect).epsilon(1e-10));
}

TEST_CASE("projections and U_z") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 3);
    auto p0 = projection_Pk(fock, 0, 3);
    auto p1 = projection_Pk(fock, 1, 3);
    CHECK(p0(0) == 0.0);  // vacuum not in range
    // mutually orthogonal, sum = 1 - vacuum projection
    for (int i = 0; i < fock->dim(); ++i) {
        CHECK(p0(i) * p1(i) == 0.0);
        CHECK(p0(i) + p1(i) == (i == 0 ? 0.0 : 1.0));
    }
    Word w = {{1, 2}, {0, 1}};
    CHECK(p1(fock->index_of(w)) == 1.0);
    CHECK(p0(fock->index_of(w)) == 0.0);

    auto len2 = length_projection(fock, 2, 3);
    CHECK(len2(0) == 0.0);
    CHECK(len2(fock->index_of(w)) == 1.0);
    CHECK(length_projection(fock, 0, 3)(0) == 1.0);

    Vector uz = apply_Uz(fock, cxd(0.0, 1.0), 3);
    CHECK(std::abs(uz(fock->index_of(w)) - cxd(-1.0)) < 1e-15);
    Vector uzbar = apply_Uz(fock, cxd(0.0, -1.0), 3);
    CHECK((uz.cwiseProduct(uzbar) - Vector::Ones(fock->dim())).cwiseAbs().maxCoeff()
          < 1e-14);
    CHECK_THROWS_AS(apply_Uz(fock, cxd(0.5, 0.0), 3), NotUnimodular);
}

TEST_CASE("band split is exact and matches the fourier quadrature") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 6);
    FreeElement x = random_element(fam, 3, 21);
    BandOperator op = represent_element(fock, x, 3);

    SpMat sum(op.mat.rows(), op.mat.cols());
    for (int n = -3; n <= 3; ++n) {
        BandOperator band = band_component(op, n);
        BandOperator fourier = band_component_fourier(op, n);
        CHECK(dense(band.mat - fourier.mat).cwiseAbs().maxCoeff() < 1e-12);
        sum += band.mat;
    }
    CHECK(dense(sum - op.mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(band_component(op, 4), DegreeOutOfRange);
}

TEST_CASE("band split of a letter: creation part") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 3);
    Letter u{0, bernoulli_symbol()};
    BandOperator op = represent_letter(fock, u, 2);
    BandOperator create = band_component(op, 1);
    // the creation part acts on the vacuum exactly as the full operator
    Matrix full = dense(op.mat), cr = dense(create.mat);
    CHECK((full.col(0) - cr.col(0)).cwiseAbs().maxCoeff() < 1e-15);
    // and has no entries lowering or preserving length
    for (int c = 0; c < cr.cols(); ++c)
        for (int r = 0; r < cr.rows(); ++r)
            if (std::abs(cr(r, c)) > 0)
                CHECK(fock->length_of(r) == fock->length_of(c) + 1);
}

TEST_CASE("u1 (x) u2 band component n=0 maps hat u2 to hat u1") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 4);
    FreeElement w = multiply(bernoulli_letter(fam, 0), bernoulli_letter(fam, 1));
    BandOperator op = represent_element(fock, w, 2);
    BandOperator h0 = band_component(op, 0);
    Vector cu = fam->at(0).hbar_coords(bernoulli_symbol());
    Vector in = Vector::Zero(fock->dim(2));
    for (int e = 0; e < 3; ++e) in(fock->index_of({{1, e}})) = cu(e);
    Vector out = h0.mat * in;
    for (int e = 0; e < 3; ++e)
        CHECK(std::abs(out(fock->index_of({{0, e}})) - cu(e)) < 1e-13);
    CHECK(std::abs(out(0)) < 1e-14);
}

TEST_CASE("annul: Pperp_k a Pperp_k = phi_k(a) Pperp_k") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 4);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Matrix a(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) a(r, c) = cxd(g(rng), g(rng));

    int level = 3;
    Letter la = fam->at(0).center(a);
    la.algebra = 0;
    cxd phi = fam->at(0).state(a);
    BandOperator rect = represent_letter(fock, la, level);
    Eigen::VectorXd pk_dom = projection_Pk(fock, 0, level);
    Eigen::VectorXd pk_cod = projection_Pk(fock, 0, level + 1);
    Eigen::VectorXd ones_dom = Eigen::VectorXd::Ones(fock->dim(level));
    Eigen::VectorXd ones_cod = Eigen::VectorXd::Ones(fock->dim(level + 1));

    // centered letter: exactly zero
    SpMat mid = scale_rows(scale_cols(rect.mat, ones_dom - pk_dom), ones_cod - pk_cod);
    CHECK(dense(mid).cwiseAbs().maxCoeff() < 1e-12);

    // uncentered a = centered + phi(a) 1: equals phi(a) Pperp
    SpMat full = rect.mat;
    std::vector<Triplet> t;
    for (std::int64_t c = 0; c < fock->dim(level); ++c) t.emplace_back(c, c, phi);
    SpMat scaled_id(fock->dim(level + 1), fock->dim(level));
    scaled_id.setFromTriplets(t.begin(), t.end());
    full = SpMat(full + scaled_id);
    SpMat lhs = scale_rows(scale_cols(full, ones_dom - pk_dom), ones_cod - pk_cod);
    Matrix diff = dense(lhs) - dense(scale_rows(scale_cols(scaled_id, ones_dom - pk_dom),
                                                ones_cod - pk_cod));
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("representation is a homomorphism against composition") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 7);
    FreeElement x = random_element(fam, 2, 31);
    FreeElement y = random_element(fam, 2, 32);
    FreeElement xy = multiply(x, y);

    int L = 2;
    BandOperator ry = represent_element(fock, y, L, L + 2);
    BandOperator rx = represent_element(fock, x, L + 2, L + 4);
    BandOperator rxy = represent_element(fock, xy, L, L + 4);
    Matrix composed = dense(rx.mat) * dense(ry.mat);
    CHECK((composed - dense(rxy.mat)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("U_z covariance: conjugation scales band components") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 5);
    FreeElement x = random_element(fam, 2, 44);
    BandOperator op = represent_element(fock, x, 2);
    cxd z = std::polar(1.0, 0.73);
    Vector dz = apply_Uz(fock, z, op.domain_L);
    Vector cz = apply_Uz(fock, z, op.codomain_L);
    SpMat conj = op.mat;
    for (int c = 0; c < conj.outerSize(); ++c)
        for (SpMat::InnerIterator it(conj, c); it; ++it)
            it.valueRef() *= std::conj(cz(it.row())) * dz(it.col());
    BandOperator conj_op = op;
    conj_op.mat = conj;
    for (int n = -2; n <= 2; ++n) {
        Matrix lhs = dense(band_component(conj_op, n).mat);
        Matrix rhs = dense(band_component(op, n).mat) * std::pow(z, n);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("truncation errors are flagged") {
    FamilyPtr fam = bernoulli_family(2);
    FockPtr fock = make_fock(fam, 2);
    Letter u{0, bernoulli_symbol()};
    CHECK_THROWS_AS(represent_letter(fock, u, 2), TruncationTooSmall);
    FreeElement w = multiply(bernoulli_letter(fam, 0), bernoulli_letter(fam, 1));
    CHECK_THROWS_AS(represent_element(fock, w, 1), TruncationTooSmall);
}
