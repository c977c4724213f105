#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dstlab/linalg.hpp"

#include <cmath>
#include <random>

using namespace dst::la;

namespace {

Mat random_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(n, n);
    for (auto& x : m.a) x = cplx(u(rng), u(rng));
    return m;
}

std::vector<cplx> random_vec(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(static_cast<size_t>(n));
    for (auto& x : v) x = cplx(u(rng), u(rng));
    return v;
}

} // namespace

TEST_CASE("lu solve reproduces the right-hand side") {
    for (int n : {3, 17, 60}) {
        Mat A = random_matrix(n, 100 + static_cast<std::uint64_t>(n));
        auto x_true = random_vec(n, 7);
        auto b = matvec(A, x_true);
        LU lu = lu_factor(A);
        auto x = b;
        lu.solve(x);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(x[static_cast<size_t>(i)] - x_true[static_cast<size_t>(i)]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("adjoint solve matches the adjoint matrix") {
    const int n = 24;
    Mat A = random_matrix(n, 5);
    auto x_true = random_vec(n, 8);
    auto b = matvec_adjoint(A, x_true);
    LU lu = lu_factor(A);
    auto x = b;
    lu.solve_adjoint(x);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(x[static_cast<size_t>(i)] - x_true[static_cast<size_t>(i)]));
    CHECK(err < 1e-10);
}

TEST_CASE("matvec adjoint pairing <Ax, y> = <x, A^H y>") {
    const int n = 15;
    Mat A = random_matrix(n, 2);
    auto x = random_vec(n, 3), y = random_vec(n, 4);
    cplx lhs = dot(y, matvec(A, x));
    cplx rhs = dot(matvec_adjoint(A, y), x);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("determinant of a known 2x2") {
    Mat A(2, 2);
    A.at(0, 0) = cplx(2.0, 1.0);
    A.at(0, 1) = cplx(0.0, 3.0);
    A.at(1, 0) = cplx(-1.0, 0.0);
    A.at(1, 1) = cplx(1.0, -1.0);
    cplx det = A.at(0, 0) * A.at(1, 1) - A.at(0, 1) * A.at(1, 0);
    LU lu = lu_factor(A);
    CHECK(lu.log_abs_det() == doctest::Approx(std::log(std::abs(det))).epsilon(1e-12));
    double dphi = std::remainder(lu.det_phase() - std::arg(det), 2.0 * 3.141592653589793);
    CHECK(std::abs(dphi) < 1e-12);
}

TEST_CASE("extreme singular values of a diagonal matrix") {
    const int n = 12;
    Mat A(n, n);
    for (int i = 0; i < n; ++i) A.at(i, i) = cplx(0.0, 1.0) * (0.5 + 0.25 * i);
    LU lu = lu_factor(A);
    LinearOp op = dense_op(A, lu);
    CHECK(sigma_max(op) == doctest::Approx(0.5 + 0.25 * (n - 1)).epsilon(1e-3));
    auto sm = sigma_min(op, true);
    CHECK(sm.sigma == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sm.sigma2 == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(std::abs(std::abs(sm.right_vector[0]) - 1.0) < 1e-8);
}

TEST_CASE("singular matrix: sigma_min near zero, vector in the nullspace") {
    const int n = 10;
    Mat A = random_matrix(n, 12);
    // make the last column a combination of the first two
    for (int i = 0; i < n; ++i) A.at(i, n - 1) = 2.0 * A.at(i, 0) - cplx(0.0, 1.0) * A.at(i, 1);
    Mat copy = A;
    LU lu = lu_factor(A);
    LinearOp op = dense_op(copy, lu);
    auto sm = sigma_min(op);
    CHECK(sm.sigma < 1e-12 * sigma_max(op));
    auto res = matvec(copy, sm.right_vector);
    CHECK(norm2(res) < 1e-10);
}

TEST_CASE("singular values match on a matrix with known svd") {
    // A = U diag(3, 1e-3) V^H built from rotations
    Mat U(2, 2), V(2, 2), A(2, 2);
    double t1 = 0.7, t2 = -0.4;
    U.at(0, 0) = std::cos(t1); U.at(0, 1) = -std::sin(t1);
    U.at(1, 0) = std::sin(t1); U.at(1, 1) = std::cos(t1);
    V.at(0, 0) = std::cos(t2); V.at(0, 1) = -std::sin(t2);
    V.at(1, 0) = std::sin(t2); V.at(1, 1) = std::cos(t2);
    double s1 = 3.0, s2 = 1e-3;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            A.at(i, j) = U.at(i, 0) * s1 * std::conj(V.at(j, 0)) +
                         U.at(i, 1) * s2 * std::conj(V.at(j, 1));
    Mat copy = A;
    LU lu = lu_factor(A);
    LinearOp op = dense_op(copy, lu);
    CHECK(sigma_max(op) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(sigma_min(op).sigma == doctest::Approx(1e-3).epsilon(1e-8));
}
