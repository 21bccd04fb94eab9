#include "freeprod/instance_gen.hpp"

#include <cmath>

namespace freeprod {

namespace {

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double re = g(rng);
            double im = g(rng);
            m(r, c) = cxd(re, im);
        }
    return m;
}

std::vector<int> random_index_tuple(int N, int len, Rng& rng) {
    std::vector<int> idx(len);
    std::uniform_int_distribution<int> first(0, N - 1);
    idx[0] = first(rng);
    std::uniform_int_distribution<int> rest(0, N - 2);
    for (int j = 1; j < len; ++j) {
        int r = rest(rng);
        idx[j] = r >= idx[j - 1] ? r + 1 : r;
    }
    return idx;
}

}  // namespace

Letter random_letter(const AlgebraWithState& alg, int algebra_index, Rng& rng,
                     double scale) {
    Matrix m = gaussian_matrix(alg.n(), alg.n(), rng);
    Letter l = alg.center(m);
    l.algebra = algebra_index;
    Eigen::JacobiSVD<Matrix> svd(l.matrix);
    double top = svd.singularValues()(0);
    if (top > 0) l.matrix *= scale / top;
    return l;
}

FreeElement generate_element(const FamilyPtr& family, const GeneratorSpec& spec) {
    if (spec.degree < 0) throw BadSpec("degree must be nonnegative");
    if (spec.terms_per_degree < 1) throw BadSpec("terms_per_degree must be positive");
    Rng rng(spec.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    int N = family->size();
    int lo = spec.homogeneous ? spec.degree : 1;
    std::vector<FreeElement::Term> terms;
    for (int deg = lo; deg <= spec.degree; ++deg) {
        if (deg == 0) continue;
        for (int t = 0; t < spec.terms_per_degree; ++t) {
            auto idx = random_index_tuple(N, deg, rng);
            std::vector<Letter> letters;
            for (int j = 0; j < deg; ++j)
                letters.push_back(
                    random_letter(family->at(idx[j]), idx[j], rng, spec.letter_scale));
            cxd coeff(g(rng), g(rng));
            terms.push_back(FreeElement::Term{coeff, std::move(letters)});
        }
    }
    cxd scalar = 0.0;
    if (!spec.homogeneous || spec.degree == 0) scalar = cxd(g(rng), g(rng));
    return FreeElement::from_terms(family, scalar, std::move(terms));
}

std::vector<Matrix> random_coeffs(int count, int s, Rng& rng) {
    std::vector<Matrix> out;
    for (int i = 0; i < count; ++i) out.push_back(gaussian_matrix(s, s, rng));
    return out;
}

AmplifiedElement generate_amplified(const FamilyPtr& family, const GeneratorSpec& spec,
                                    int s) {
    FreeElement x = generate_element(family, spec);
    if (s <= 1) return AmplifiedElement::from(x);
    Rng rng(spec.seed ^ 0x6a09e667f3bcc908ull);
    auto coeffs = random_coeffs(static_cast<int>(x.terms().size()), s, rng);
    Matrix scalar = Matrix::Zero(s, s);
    if (std::abs(x.scalar()) > 0)
        scalar = x.scalar() * Matrix::Identity(s, s);
    AmplifiedElement a = AmplifiedElement::from(x, s, coeffs, scalar);
    return a;
}

}  // namespace freeprod
