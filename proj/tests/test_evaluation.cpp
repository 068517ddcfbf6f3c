#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvfs/errors.hpp"
#include "mvfs/evaluation.hpp"
#include "mvfs/synth.hpp"
#include "support.hpp"

using namespace mvfs;

namespace {

Labels random_labels(std::mt19937_64& rng, int n, int k) {
    std::uniform_int_distribution<int> u(0, k - 1);
    Labels out(static_cast<std::size_t>(n));
    for (auto& y : out) y = u(rng);
    return out;
}

Labels relabel(const Labels& in, const std::vector<int>& perm) {
    Labels out;
    for (int y : in) out.push_back(perm[static_cast<std::size_t>(y)]);
    return out;
}

// Minimum within-cluster SSE over every 2-partition.
double best_two_partition_sse(const Matrix& x) {
    const int n = static_cast<int>(x.rows());
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        double sse = 0.0;
        for (int side = 0; side < 2; ++side) {
            RowVector mean = RowVector::Zero(x.cols());
            int count = 0;
            for (int i = 0; i < n; ++i)
                if (((mask >> i) & 1) == side) {
                    mean += x.row(i);
                    ++count;
                }
            mean /= count;
            for (int i = 0; i < n; ++i)
                if (((mask >> i) & 1) == side) sse += (x.row(i) - mean).squaredNorm();
        }
        best = std::min(best, sse);
    }
    return best;
}

}  // namespace

TEST_CASE("k equal to N leaves every point alone") {
    std::mt19937_64 rng(1);
    const Matrix x = testing::random_matrix(rng, 6, 2);
    const auto r = kmeans(x, 6, 3, 1);
    CHECK(r.sse == 0.0);
    CHECK(testing::distinct(r.labels).size() == 6);
}

TEST_CASE("two separated blobs are recovered") {
    std::mt19937_64 rng(2);
    Matrix x = testing::random_matrix(rng, 40, 2, 0.1);
    Labels truth(40);
    for (int i = 20; i < 40; ++i) {
        x.row(i).array() += 20.0;
        truth[static_cast<std::size_t>(i)] = 1;
    }
    CHECK(acc(kmeans(x, 2, 5, 3).labels, truth) == 1.0);
}

TEST_CASE("1-D k-means reaches the exhaustive optimum") {
    Matrix x(6, 1);
    x << 0, 1, 2, 10, 11, 12;
    const double oracle = best_two_partition_sse(x);
    CHECK(oracle == doctest::Approx(4.0));
    CHECK(kmeans(x, 2, 10, 0).sse == doctest::Approx(oracle));
}

TEST_CASE("k-means matches the exhaustive optimum on small random sets") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const Matrix x = testing::random_matrix(rng, 9, 2);
        CHECK(kmeans(x, 2, 20, std::uint64_t(t)).sse <= best_two_partition_sse(x) + 1e-9);
    }
}

TEST_CASE("k-means is deterministic for a seed") {
    std::mt19937_64 rng(4);
    const Matrix x = testing::random_matrix(rng, 50, 3);
    const auto a = kmeans(x, 4, 5, 77), b = kmeans(x, 4, 5, 77);
    CHECK(a.labels == b.labels);
    CHECK(a.sse == b.sse);
}

TEST_CASE("k-means argument checks") {
    Matrix x = Matrix::Zero(3, 1);
    CHECK_THROWS_AS(kmeans(x, 0, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(kmeans(x, 4, 1, 0), InvalidArgument);
}

TEST_CASE("nmi extremes") {
    const Labels y = {0, 0, 1, 1, 2, 2};
    CHECK(nmi(y, y) == doctest::Approx(1.0));
    CHECK(nmi({0, 1, 0, 1}, {0, 0, 1, 1}) == doctest::Approx(0.0));
    CHECK(nmi({0, 0, 0}, {0, 0, 0}) == 1.0);
    CHECK(nmi({0, 0, 0, 0}, {0, 1, 0, 1}) == 0.0);
}

TEST_CASE("nmi matches a hand contingency table") {
    // pred [0,0,1,1], truth [A,A,A,B]
    const Labels pred = {0, 0, 1, 1}, truth = {0, 0, 0, 1};
    const double hp = std::log(2.0);
    const double ht = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    const double mi = 0.5 * std::log(0.5 / (0.5 * 0.75)) + 0.25 * std::log(0.25 / (0.5 * 0.75)) +
                      0.25 * std::log(0.25 / (0.5 * 0.25));
    CHECK(nmi(pred, truth) == doctest::Approx(mi / std::sqrt(hp * ht)).epsilon(1e-14));
    CHECK(nmi(pred, truth) == doctest::Approx(testing::nmi_contingency(pred, truth)).epsilon(1e-14));
}

TEST_CASE("acc examples") {
    CHECK(acc({2, 2, 0, 0, 1}, {0, 0, 1, 1, 2}) == 1.0);
    CHECK(acc({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.5);
}

TEST_CASE("acc matches the permutation oracle and metrics are relabelling invariant") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> kdist(1, 5), ndist(1, 30);
    for (int t = 0; t < 200; ++t) {
        const int kp = kdist(rng), kt = kdist(rng), n = ndist(rng);
        const Labels pred = random_labels(rng, n, kp), truth = random_labels(rng, n, kt);
        CHECK(acc(pred, truth) == testing::acc_bruteforce(pred, truth));
        CHECK(std::abs(nmi(pred, truth) - testing::nmi_contingency(pred, truth)) <= 1e-12);
        CHECK(purity(pred, truth) == testing::purity_contingency(pred, truth));
        CHECK(purity(pred, truth) >= acc(pred, truth));

        std::vector<int> perm(5);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const Labels p2 = relabel(pred, perm), t2 = relabel(truth, perm);
        CHECK(acc(p2, truth) == acc(pred, truth));
        CHECK(acc(pred, t2) == acc(pred, truth));
        CHECK(std::abs(nmi(p2, t2) - nmi(pred, truth)) <= 1e-12);
        CHECK(purity(p2, truth) == purity(pred, truth));
        CHECK(purity(pred, t2) == purity(pred, truth));
    }
}

TEST_CASE("purity example") {
    CHECK(purity({1, 1, 1, 2}, {0, 0, 1, 1}) == doctest::Approx(0.75));
}

TEST_CASE("metric inputs must agree in length") {
    CHECK_THROWS_AS(nmi({0, 1}, {0}), InvalidArgument);
    CHECK_THROWS_AS(acc({}, {}), InvalidArgument);
}

TEST_CASE("assignment solver matches brute force") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + t % 6;
        Matrix cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = u(rng);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto match = min_cost_assignment(cost);
        double got = 0.0;
        for (int i = 0; i < n; ++i) got += cost(i, match[static_cast<std::size_t>(i)]);
        CHECK(got == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("summary uses the population deviation") {
    const auto s = MetricSummary::of({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.stddev == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);
}

TEST_CASE("derived seeds differ per index") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 100);
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("powers of two and the cartesian grid") {
    const auto p = powers_of_two(-5, 5);
    REQUIRE(p.size() == 11);
    CHECK(p.front() == 1.0 / 32.0);
    CHECK(p.back() == 32.0);
    const auto g = cartesian_grid({1, 2}, {3}, {4, 5}, {6});
    REQUIRE(g.size() == 4);
    CHECK(g[1].gamma == 5.0);
    CHECK(g[2].alpha == 2.0);
}

TEST_CASE("evaluation is reproducible and keeps the lowest-SSE assignment") {
    SynthSpec spec;
    spec.instances = 60;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 10;
    EvalOptions opts;
    opts.repeats = 5;
    opts.restarts = 3;
    const auto a = fit_and_evaluate(ds, hp, opts);
    const auto b = fit_and_evaluate(ds, hp, opts);
    CHECK(a.nmi.runs == b.nmi.runs);
    CHECK(a.best_assignment == b.best_assignment);
    CHECK(a.best_assignment.size() == 60);
    CHECK(a.repeats == 5);
    CHECK(a.clusters == 4);
}

TEST_CASE("a one-point grid equals a single fit and evaluation") {
    SynthSpec spec;
    spec.instances = 60;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 10;
    GridOptions go;
    go.eval.repeats = 3;
    go.eval.restarts = 2;
    const auto r = grid_search(ds, hp, {{0.5, 2.0, 1.0, 4.0}}, go);
    REQUIRE(r.rows.size() == 1);
    hp.alpha = 0.5;
    hp.beta = 2.0;
    hp.gamma = 1.0;
    hp.delta = 4.0;
    const auto single = fit_and_evaluate(ds, hp, go.eval);
    CHECK(r.rows[0].report.nmi.runs == single.nmi.runs);
    CHECK(r.best_nmi == 0);
}

TEST_CASE("grid marks failing points, picks the best mean and ignores thread count") {
    SynthSpec spec;
    spec.instances = 60;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 6;
    GridOptions go;
    go.eval.repeats = 2;
    go.eval.restarts = 2;
    const auto grid = cartesian_grid({0.25, 4.0}, {1.0}, {0.5, 8.0}, {1.0, 0.0});
    const auto one = grid_search(ds, hp, grid, go);
    go.threads = 3;
    const auto many = grid_search(ds, hp, grid, go);
    REQUIRE(one.rows.size() == 8);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(one.rows[i].ok == (grid[i].delta > 0.0));
        CHECK(many.rows[i].ok == one.rows[i].ok);
        if (one.rows[i].ok) CHECK(many.rows[i].report.nmi.runs == one.rows[i].report.nmi.runs);
        else CHECK_FALSE(one.rows[i].error.empty());
    }
    REQUIRE(one.best_nmi >= 0);
    for (const auto& row : one.rows) {
        if (row.ok) CHECK(row.report.nmi.mean <= one.rows[std::size_t(one.best_nmi)].report.nmi.mean);
    }
    CHECK(many.best_nmi == one.best_nmi);
}

TEST_CASE("ablation reports the three variants in order") {
    SynthSpec spec;
    spec.instances = 60;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 6;
    EvalOptions opts;
    opts.repeats = 2;
    opts.restarts = 2;
    const auto rows = ablate(ds, hp, opts);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].variant == Variant::Full);
    CHECK(rows[1].variant == Variant::CommonOnly);
    CHECK(rows[2].variant == Variant::NoConsistency);
    for (const auto& e : rows[2].trace) CHECK(e.terms.consistency == 0.0);
}
