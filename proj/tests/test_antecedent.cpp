#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvfs/antecedent.hpp"
#include "mvfs/errors.hpp"
#include "support.hpp"

using namespace mvfs;

TEST_CASE("varpart splits two separated pairs into their points") {
    Matrix x(4, 2);
    x << 0, 0, 0, 0, 10, 10, 10, 10;
    const Matrix c = varpart_centers(x, 2);
    REQUIRE(c.rows() == 2);
    CHECK(c.row(0).isApprox(RowVector::Zero(2)));
    CHECK(c.row(1).isApprox(RowVector::Constant(2, 10.0)));
}

TEST_CASE("varpart with one rule returns the column mean") {
    std::mt19937_64 rng(3);
    const Matrix x = testing::random_matrix(rng, 17, 5);
    const Matrix c = varpart_centers(x, 1);
    CHECK((c.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("varpart on two 1-D blobs matches the single split at the global mean") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(20, 1);
    for (int i = 0; i < 20; ++i) x(i, 0) = (i < 10 ? 0.0 : 100.0) + g(rng);
    const double mean = x.mean();
    double lo = 0.0, hi = 0.0;
    int nlo = 0, nhi = 0;
    for (int i = 0; i < 20; ++i) {
        if (x(i, 0) < mean) {
            lo += x(i, 0);
            ++nlo;
        } else {
            hi += x(i, 0);
            ++nhi;
        }
    }
    const Matrix c = varpart_centers(x, 2);
    std::vector<double> got = {c(0, 0), c(1, 0)};
    std::sort(got.begin(), got.end());
    CHECK(got[0] == doctest::Approx(lo / nlo).epsilon(1e-12));
    CHECK(got[1] == doctest::Approx(hi / nhi).epsilon(1e-12));
}

TEST_CASE("varpart duplicates a center with a warning when nothing can split") {
    Matrix x(3, 1);
    x << 1, 1, 1;
    std::vector<std::string> warnings;
    const Matrix c = varpart_centers(x, 2, &warnings);
    CHECK(c.rows() == 2);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(1, 0) == 1.0);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("varpart rejects a bad rule count") {
    Matrix x = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(varpart_centers(x, 0), InvalidArgument);
}

TEST_CASE("widths of a single rule are one") {
    std::mt19937_64 rng(5);
    const Matrix x = testing::random_matrix(rng, 12, 4);
    const Matrix q = estimate_widths(x, varpart_centers(x, 1));
    CHECK((q.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("widths split evenly for symmetric centers") {
    Matrix x(2, 1), e(2, 1);
    x << -1, 1;
    e << -1, 1;
    const Matrix q = estimate_widths(x, e);
    CHECK(q(0, 0) == doctest::Approx(0.5));
    CHECK(q(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("constant column at the centers gets the floor and a warning") {
    Matrix x = Matrix::Constant(4, 1, 2.5);
    Matrix e = Matrix::Constant(2, 1, 2.5);
    std::vector<std::string> warnings;
    const Matrix q = estimate_widths(x, e, &warnings);
    CHECK(q(0, 0) == kWidthFloor);
    CHECK(q(1, 0) == kWidthFloor);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("widths are pure") {
    std::mt19937_64 rng(9);
    const Matrix x = testing::random_matrix(rng, 30, 6);
    const Matrix c1 = varpart_centers(x, 3), c2 = varpart_centers(x, 3);
    CHECK(c1 == c2);
    CHECK(estimate_widths(x, c1) == estimate_widths(x, c2));
}

TEST_CASE("single rule fires fully") {
    AntecedentBank bank{Matrix::Zero(1, 3), Matrix::Ones(1, 3)};
    RowVector x(3);
    x << 4, -2, 7;
    const Vector mu = firing_levels(x, bank);
    REQUIRE(mu.size() == 1);
    CHECK(mu(0) == 1.0);
}

TEST_CASE("membership peaks at the rule center") {
    Matrix e(2, 2);
    e << 0, 0, 3, 3;
    AntecedentBank bank{e, Matrix::Constant(2, 2, 0.5)};
    const Vector mu = firing_levels(e.row(0), bank);
    CHECK(mu(0) > mu(1));
    CHECK(mu.sum() == doctest::Approx(1.0));
}

TEST_CASE("log-domain firing matches direct evaluation at small scale") {
    std::mt19937_64 rng(21);
    AntecedentBank bank{testing::random_matrix(rng, 3, 2), Matrix::Constant(3, 2, 0.7)};
    const RowVector x = testing::random_matrix(rng, 1, 2);
    long double raw[3], sum = 0;
    for (int k = 0; k < 3; ++k) {
        long double s = 0;
        for (int j = 0; j < 2; ++j) {
            const long double d = x(j) - bank.centers(k, j);
            s += d * d / (2.0L * bank.widths(k, j));
        }
        raw[k] = std::exp(-s);
        sum += raw[k];
    }
    const Vector mu = firing_levels(x, bank);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(double(raw[k] / sum) - mu(k)) < 1e-14);
}

TEST_CASE("firing stays normalised far from every center in 300 dimensions") {
    std::mt19937_64 rng(2);
    AntecedentBank bank{testing::random_matrix(rng, 4, 300), Matrix::Constant(4, 300, 1e-3)};
    const RowVector x = RowVector::Constant(300, 50.0);
    const Vector mu = firing_levels(x, bank);
    CHECK(mu.allFinite());
    CHECK(std::abs(mu.sum() - 1.0) < 1e-12);
    CHECK(mu.maxCoeff() > 0.0);
}

TEST_CASE("fuzzy map with one rule is [1, x]") {
    std::mt19937_64 rng(4);
    const Matrix x = testing::random_matrix(rng, 5, 3);
    AntecedentBank bank{Matrix::Zero(1, 3), Matrix::Ones(1, 3)};
    const Matrix xg = fuzzy_map(x, bank);
    REQUIRE(xg.cols() == 4);
    CHECK((xg.col(0).array() == 1.0).all());
    CHECK(xg.rightCols(3) == x);
}

TEST_CASE("fuzzy map shape and firing blocks") {
    std::mt19937_64 rng(6);
    Matrix x3 = testing::random_matrix(rng, 3, 2);
    AntecedentBank b2{varpart_centers(x3, 2), Matrix::Constant(2, 2, 0.5)};
    const Matrix g = fuzzy_map(x3, b2);
    CHECK(g.rows() == 3);
    CHECK(g.cols() == 6);

    const Matrix x = testing::random_matrix(rng, 25, 4);
    AntecedentBank b3{varpart_centers(x, 3), estimate_widths(x, varpart_centers(x, 3))};
    const Matrix xg = fuzzy_map(x, b3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(std::abs(xg(i, 0) + xg(i, 5) + xg(i, 10) - 1.0) < 1e-12);
    }
}

TEST_CASE("standardizer zeroes constant columns and reuses training statistics") {
    Matrix x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    const auto s = Standardizer::fit(x);
    const Matrix z = s.apply(x);
    CHECK(z.col(1).isZero());
    CHECK(std::abs(z.col(0).mean()) < 1e-15);
    Matrix other(1, 2);
    other << 2, 99;
    CHECK(s.apply(other)(0, 1) == 0.0);
    CHECK(s.apply(other)(0, 0) == 0.0);
}

TEST_CASE("view antecedent transform matches its fuzzy dimension") {
    std::mt19937_64 rng(8);
    const Matrix raw = testing::random_matrix(rng, 40, 6, 3.0);
    const auto va = ViewAntecedent::estimate(raw, 3);
    const Matrix xg = va.transform(raw);
    CHECK(xg.rows() == 40);
    CHECK(xg.cols() == va.fuzzy_dim());
    CHECK(va.fuzzy_dim() == 21);
}
