#pragma once

#include "mvfs/solver.hpp"
#include "mvfs/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvfs {

inline constexpr int kDefaultRepeats = 20;
inline constexpr int kDefaultRestarts = 10;

struct KMeansResult {
    Labels labels;
    Matrix centers;
    double sse = 0.0;
};

/// Lloyd iterations from k-means++ seeding, best of `restarts` by SSE.
/// An empty cluster is re-seeded at the point farthest from its center.
KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed);

double nmi(const Labels& pred, const Labels& truth);
double acc(const Labels& pred, const Labels& truth);
double purity(const Labels& pred, const Labels& truth);

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column chosen for every row.
std::vector<int> min_cost_assignment(const Matrix& cost);

/// splitmix64 mix of (base, index); used for per-repeat seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct MetricSummary {
    std::vector<double> runs;
    double mean = 0.0;
    double stddev = 0.0;  // population
    double min = 0.0;
    double max = 0.0;

    static MetricSummary of(std::vector<double> runs);
};

struct ClusteringReport {
    MetricSummary nmi;
    MetricSummary acc;
    MetricSummary purity;
    Labels best_assignment;  // run with the lowest K-means SSE
    int clusters = 0;
    int repeats = 0;
};

struct EvalOptions {
    int repeats = kDefaultRepeats;
    int restarts = kDefaultRestarts;
    std::uint64_t seed = 0;
    int clusters = 0;  // 0: number of distinct ground-truth classes
};

ClusteringReport evaluate_embedding(const Matrix& embedding, const Labels& truth, const EvalOptions& options);

/// Fits, embeds and clusters `repeats` times. With `refit` every repeat also
/// refits the model from a derived seed.
ClusteringReport fit_and_evaluate(const MultiViewDataset& dataset, const Hyperparams& hp, const EvalOptions& options,
                                  bool refit = false, FittedModel* first_model = nullptr);

struct GridPoint {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 1.0;
};

/// 2^lo .. 2^hi inclusive.
std::vector<double> powers_of_two(int lo, int hi);
std::vector<GridPoint> cartesian_grid(const std::vector<double>& alphas, const std::vector<double>& betas,
                                      const std::vector<double>& gammas, const std::vector<double>& deltas);

struct GridRow {
    GridPoint point;
    bool ok = false;
    std::string error;
    ClusteringReport report;
};

struct GridOptions {
    EvalOptions eval;
    bool refit = false;
    int threads = 1;
};

struct GridResult {
    std::vector<GridRow> rows;
    int best_nmi = -1;  // row indices by best mean, -1 if every point failed
    int best_acc = -1;
    int best_purity = -1;
};

/// Runs every grid point; a failing fit marks its row and the sweep goes on.
/// Rows keep grid order regardless of thread count.
GridResult grid_search(const MultiViewDataset& dataset, const Hyperparams& base, const std::vector<GridPoint>& grid,
                       const GridOptions& options);

struct AblationRow {
    Variant variant = Variant::Full;
    ClusteringReport report;
    FitTrace trace;
};

std::vector<AblationRow> ablate(const MultiViewDataset& dataset, const Hyperparams& hp, const EvalOptions& options);

}  // namespace mvfs
