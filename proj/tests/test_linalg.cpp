#include "doctest.h"

#include <random>
#include <vector>

#include "chebrec/errors.hpp"
#include "chebrec/linalg.hpp"
#include "test_support.hpp"

using namespace chebrec;
namespace ts = chebrec::testsupport;

TEST_CASE("matrix shape, access, and column gather") {
    Matrix a(2, 3);
    a(0, 0) = 1.0; a(0, 1) = 2.0; a(0, 2) = 3.0;
    a(1, 0) = 4.0; a(1, 1) = 5.0; a(1, 2) = 6.0;
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 3);

    const std::vector<int> pick = {2, 0};
    const Matrix g = a.select_columns(pick);
    CHECK(g(0, 0) == 3.0);
    CHECK(g(0, 1) == 1.0);
    CHECK(g(1, 0) == 6.0);
    CHECK(g(1, 1) == 4.0);

    const std::vector<double> x = {1.0, 1.0, 1.0};
    CHECK(multiply(a, x) == std::vector<double>{6.0, 15.0});
    const std::vector<double> z = {1.0, -1.0};
    CHECK(multiply_transpose(a, z) == std::vector<double>{-3.0, -3.0, -3.0});
}

TEST_CASE("lu solves random well-conditioned systems") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = ts::uniform(rng, -1.0, 1.0) + (i == j ? 3.0 : 0.0);
        std::vector<double> x_true(static_cast<std::size_t>(n));
        for (auto& v : x_true) v = ts::uniform(rng, -2.0, 2.0);
        const std::vector<double> b = multiply(a, x_true);

        const LuFactorization lu(a);
        REQUIRE_FALSE(lu.singular());
        const std::vector<double> x = lu.solve(b);
        for (int i = 0; i < n; ++i)
            CHECK(x[static_cast<std::size_t>(i)] ==
                  doctest::Approx(x_true[static_cast<std::size_t>(i)]).epsilon(1e-10));

        const std::vector<double> bt = multiply_transpose(a, x_true);
        const std::vector<double> xt = lu.solve_transpose(bt);
        for (int i = 0; i < n; ++i)
            CHECK(xt[static_cast<std::size_t>(i)] ==
                  doctest::Approx(x_true[static_cast<std::size_t>(i)]).epsilon(1e-10));
    }
}

TEST_CASE("determinant matches cofactor expansion on 3x3") {
    Matrix a(3, 3);
    a(0, 0) = 2.0; a(0, 1) = -1.0; a(0, 2) = 0.5;
    a(1, 0) = 1.0; a(1, 1) = 3.0;  a(1, 2) = -2.0;
    a(2, 0) = 0.0; a(2, 1) = 1.5;  a(2, 2) = 1.0;
    // 2*(3*1 - (-2)*1.5) - (-1)*(1*1 - (-2)*0) + 0.5*(1*1.5 - 3*0)
    const double expected = 2.0 * 6.0 + 1.0 * 1.0 + 0.5 * 1.5;
    CHECK(LuFactorization(a).determinant() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("determinant sign tracks row exchanges") {
    // needs a pivot swap: leading entry is zero
    Matrix a(2, 2);
    a(0, 0) = 0.0; a(0, 1) = 1.0;
    a(1, 0) = 1.0; a(1, 1) = 0.0;
    CHECK(LuFactorization(a).determinant() == doctest::Approx(-1.0));
}

TEST_CASE("singular matrix is flagged, not divided by") {
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = static_cast<double>(i + 1);  // rank 1
    const LuFactorization lu(a);
    CHECK(lu.singular());
    CHECK(lu.determinant() == 0.0);
    const std::vector<double> b = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)lu.solve(b), numerical_error);
    CHECK_THROWS_AS((void)lu.solve_transpose(b), numerical_error);
}

TEST_CASE("packed round trip rebuilds an identical solver") {
    std::mt19937_64 rng(11);
    Matrix a(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = ts::uniform(rng, -2.0, 2.0) + (i == j ? 4.0 : 0.0);
    const LuFactorization lu(a);
    REQUIRE_FALSE(lu.singular());

    const LuFactorization rebuilt =
        LuFactorization::from_packed(4, lu.packed(), lu.pivot_rows());
    CHECK(rebuilt.determinant() == lu.determinant());
    const std::vector<double> b = {1.0, -2.0, 0.5, 3.0};
    CHECK(rebuilt.solve(b) == lu.solve(b));
    CHECK(rebuilt.solve_transpose(b) == lu.solve_transpose(b));
}

TEST_CASE("non-square and mismatched inputs are rejected") {
    Matrix a(2, 3);
    CHECK_THROWS_AS(LuFactorization{a}, config_error);
    Matrix sq(2, 2);
    sq(0, 0) = 1.0; sq(1, 1) = 1.0;
    const LuFactorization lu(sq);
    const std::vector<double> wrong = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)lu.solve(wrong), config_error);
}
