#include <doctest.h>

#include <random>

#include "freeprod/algebra.hpp"

using namespace freeprod;

namespace {
Matrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = cxd(g(rng), g(rng));
    return m;
}
}  // namespace

TEST_CASE("trivial algebra C") {
    AlgebraWithState a = make_algebra(1, Matrix::Constant(1, 1, 1.0));
    CHECK(a.gns_dim() == 1);
    CHECK(a.hbar_basis().empty());
}

TEST_CASE("M2 with normalized trace") {
    AlgebraWithState a = make_algebra(2, Matrix::Identity(2, 2) / 2.0);
    CHECK(a.gns_dim() == 4);
    CHECK(a.hbar_basis().size() == 3);
    std::mt19937_64 rng(1);
    Matrix x = random_matrix(2, rng), y = random_matrix(2, rng);
    CHECK(std::abs(a.inner(x, y) - (x.adjoint() * y).trace() / 2.0) < 1e-12);
}

TEST_CASE("state evaluation") {
    AlgebraWithState half = make_algebra(2, Matrix::Identity(2, 2) / 2.0);
    Matrix u = bernoulli_symbol();
    CHECK(std::abs(half.state(u)) < 1e-15);
    CHECK(std::abs(half.state(Matrix::Identity(2, 2)) - 1.0) < 1e-15);

    Matrix rho(2, 2);
    rho << 0.7, 0.0, 0.0, 0.3;
    AlgebraWithState skew = make_algebra(2, rho);
    CHECK(std::abs(skew.state(u) - 0.4) < 1e-15);
}

TEST_CASE("bernoulli letter in the diagonal encoding") {
    AlgebraWithState a = make_algebra(2, Matrix::Identity(2, 2) / 2.0);
    Matrix u = bernoulli_symbol();
    CHECK(std::abs(a.state(u)) < 1e-15);
    CHECK(std::abs(a.inner(u, u) - 1.0) < 1e-15);
}

TEST_CASE("center") {
    Matrix rho(2, 2);
    rho << 0.7, 0.0, 0.0, 0.3;
    AlgebraWithState a = make_algebra(2, rho);
    CHECK(a.center(Matrix::Identity(2, 2)).matrix.cwiseAbs().maxCoeff() < 1e-15);

    Matrix e11 = Matrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    Matrix expect(2, 2);
    expect << 0.3, 0.0, 0.0, -0.7;
    CHECK((a.center(e11).matrix - expect).cwiseAbs().maxCoeff() < 1e-15);
    // idempotence
    Letter once = a.center(e11);
    CHECK((a.center(once.matrix).matrix - once.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gns left multiplication is a unital homomorphism") {
    std::mt19937_64 rng(7);
    Matrix rho(2, 2);
    rho << 0.6, cxd(0.1, 0.05), cxd(0.1, -0.05), 0.4;
    AlgebraWithState alg = make_algebra(2, rho);
    CHECK((alg.gns_left_mult(Matrix::Identity(2, 2)) - Matrix::Identity(4, 4))
              .cwiseAbs().maxCoeff() < 1e-12);
    Matrix a = random_matrix(2, rng), b = random_matrix(2, rng);
    Matrix lhs = alg.gns_left_mult(a * b);
    Matrix rhs = alg.gns_left_mult(a) * alg.gns_left_mult(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    // adjoint compatibility <hat x, a hat y> = <hat(a* x), hat y>
    Matrix x = random_matrix(2, rng), y = random_matrix(2, rng);
    cxd lhs2 = alg.inner(x, a * y);
    cxd rhs2 = alg.inner(a.adjoint() * x, y);
    CHECK(std::abs(lhs2 - rhs2) < 1e-12);
}

TEST_CASE("bernoulli action: u hat(u) = xi") {
    AlgebraWithState a = make_algebra(2, Matrix::Identity(2, 2) / 2.0);
    Matrix u = bernoulli_symbol();
    Vector coords = a.hat_coords(u * u);
    CHECK(std::abs(coords(0) - 1.0) < 1e-15);
    CHECK(coords.tail(3).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("hat-map isometry and row pairing") {
    std::mt19937_64 rng(3);
    Matrix rho(2, 2);
    rho << 0.55, cxd(0.05, 0.1), cxd(0.05, -0.1), 0.45;
    AlgebraWithState alg = make_algebra(2, rho);
    Matrix a = random_matrix(2, rng), b = random_matrix(2, rng);
    cxd coord_inner = alg.hat_coords(a).dot(alg.hat_coords(b));
    CHECK(std::abs(coord_inner - alg.inner(a, b)) < 1e-12);
    CHECK(std::abs(alg.pairing_op(a, b) - (rho * a * b.adjoint()).trace()) < 1e-13);
}

TEST_CASE("validation errors") {
    Matrix rho(2, 2);
    rho << 0.5, 0.4, 0.1, 0.5;  // not Hermitian
    CHECK_THROWS_AS(make_algebra(2, rho), NotDensityMatrix);

    Matrix rho2(2, 2);
    rho2 << 1.0, 0.0, 0.0, 0.0;  // singular
    CHECK_THROWS_AS(make_algebra(2, rho2), NotFaithful);

    Matrix rho3 = Matrix::Identity(2, 2);  // trace 2
    CHECK_THROWS_AS(make_algebra(2, rho3), NotDensityMatrix);

    AlgebraWithState ok = make_algebra(2, Matrix::Identity(2, 2) / 2.0);
    CHECK_THROWS_AS(ok.state(Matrix::Identity(3, 3)), DimensionMismatch);
}
