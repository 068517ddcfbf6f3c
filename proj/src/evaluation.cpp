#include "mvfs/evaluation.hpp"

#include "mvfs/errors.hpp"
#include "mvfs/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

namespace mvfs {

namespace {

double sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

// Assigns every point to its nearest center (ties to the lower index).
bool assign(const Matrix& points, const Matrix& centers, Labels& labels, Vector& dist) {
    bool changed = false;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        int best = 0;
        double best_d = sq_dist(points, i, centers, 0);
        for (Eigen::Index c = 1; c < centers.rows(); ++c) {
            const double d = sq_dist(points, i, centers, c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        if (labels[static_cast<std::size_t>(i)] != best) {
            labels[static_cast<std::size_t>(i)] = best;
            changed = true;
        }
        dist(i) = best_d;
    }
    return changed;
}

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
    const Eigen::Index n = points.rows();
    Matrix centers(k, points.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::Index pick = first(rng);
    chosen[static_cast<std::size_t>(pick)] = true;
    centers.row(0) = points.row(pick);
    Vector nearest(n);
    for (Eigen::Index i = 0; i < n; ++i) nearest(i) = sq_dist(points, i, centers, 0);

    for (int c = 1; c < k; ++c) {
        const double total = nearest.sum();
        pick = -1;
        if (total > 0.0) {
            const double r = unit(rng) * total;
            double cum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += nearest(i);
                if (cum > r && nearest(i) > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {  // rounding at the tail
                for (Eigen::Index i = n - 1; i >= 0; --i) {
                    if (nearest(i) > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        if (pick < 0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen[static_cast<std::size_t>(pick)] = true;
        centers.row(c) = points.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) nearest(i) = std::min(nearest(i), sq_dist(points, i, centers, c));
    }
    return centers;
}

KMeansResult lloyd(const Matrix& points, Matrix centers) {
    constexpr int kMaxIter = 300;
    const Eigen::Index n = points.rows();
    const Eigen::Index k = centers.rows();
    KMeansResult r;
    r.labels.assign(static_cast<std::size_t>(n), -1);
    Vector dist(n);
    assign(points, centers, r.labels, dist);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = r.labels[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            Eigen::Index far = 0;
            dist.maxCoeff(&far);
            centers.row(c) = points.row(far);
            dist(far) = 0.0;
        }
        if (!assign(points, centers, r.labels, dist)) break;
    }
    r.centers = std::move(centers);
    r.sse = dist.sum();
    return r;
}

struct Contingency {
    Matrix counts;  // pred x truth
    double n = 0.0;
};

Contingency contingency(const Labels& pred, const Labels& truth) {
    if (pred.size() != truth.size()) {
        throw InvalidArgument("label vectors differ in length (" + std::to_string(pred.size()) + " vs " +
                              std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) throw InvalidArgument("label vectors are empty");
    std::map<int, Eigen::Index> pi, ti;
    for (auto p : pred) pi.emplace(p, 0);
    for (auto t : truth) ti.emplace(t, 0);
    Eigen::Index idx = 0;
    for (auto& [_, v] : pi) v = idx++;
    idx = 0;
    for (auto& [_, v] : ti) v = idx++;
    Contingency c;
    c.counts = Matrix::Zero(static_cast<Eigen::Index>(pi.size()), static_cast<Eigen::Index>(ti.size()));
    for (std::size_t i = 0; i < pred.size(); ++i) c.counts(pi[pred[i]], ti[truth[i]]) += 1.0;
    c.n = static_cast<double>(pred.size());
    return c;
}

double entropy(const Vector& marginal, double n) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < marginal.size(); ++i) {
        if (marginal(i) > 0.0) {
            const double p = marginal(i) / n;
            h -= p * std::log(p);
        }
    }
    return h;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed) {
    if (k < 1) throw InvalidArgument("cluster count must be at least 1");
    if (k > points.rows()) {
        throw InvalidArgument("cluster count " + std::to_string(k) + " exceeds point count " +
                              std::to_string(points.rows()));
    }
    if (!points.allFinite()) throw InvalidArgument("k-means input contains non-finite values");
    std::mt19937_64 rng(seed);
    KMeansResult best;
    best.sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        KMeansResult run = lloyd(points, seed_plus_plus(points, k, rng));
        if (run.sse < best.sse) best = std::move(run);
    }
    return best;
}

double nmi(const Labels& pred, const Labels& truth) {
    const Contingency c = contingency(pred, truth);
    const Vector rows = c.counts.rowwise().sum();
    const Vector cols = c.counts.colwise().sum().transpose();
    const double hp = entropy(rows, c.n);
    const double ht = entropy(cols, c.n);
    if (hp == 0.0 && ht == 0.0) return 1.0;
    if (hp == 0.0 || ht == 0.0) return 0.0;
    double mi = 0.0;
    for (Eigen::Index i = 0; i < c.counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.counts.cols(); ++j) {
            const double nij = c.counts(i, j);
            if (nij > 0.0) mi += nij / c.n * std::log(c.n * nij / (rows(i) * cols(j)));
        }
    }
    return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double acc(const Labels& pred, const Labels& truth) {
    const Contingency c = contingency(pred, truth);
    const Eigen::Index size = std::max(c.counts.rows(), c.counts.cols());
    Matrix cost = Matrix::Zero(size, size);
    cost.topLeftCorner(c.counts.rows(), c.counts.cols()) = -c.counts;
    const std::vector<int> match = min_cost_assignment(cost);
    double hit = 0.0;
    for (Eigen::Index i = 0; i < size; ++i) hit -= cost(i, match[static_cast<std::size_t>(i)]);
    return hit / c.n;
}

double purity(const Labels& pred, const Labels& truth) {
    const Contingency c = contingency(pred, truth);
    return c.counts.rowwise().maxCoeff().sum() / c.n;
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
    // Shortest augmenting path Hungarian method with row/column potentials,
    // O(n^3). Indices are 1-based internally; column 0 is a sentinel.
    const auto n = static_cast<std::size_t>(cost.rows());
    if (cost.cols() != cost.rows()) throw InvalidArgument("assignment cost matrix must be square");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(n, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] != 0) match[p[j] - 1] = static_cast<int>(j - 1);
    }
    return match;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MetricSummary MetricSummary::of(std::vector<double> runs) {
    MetricSummary s;
    s.runs = std::move(runs);
    if (s.runs.empty()) return s;
    double sum = 0.0;
    for (double r : s.runs) sum += r;
    s.mean = sum / static_cast<double>(s.runs.size());
    double var = 0.0;
    for (double r : s.runs) var += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(s.runs.size()));
    const auto [lo, hi] = std::minmax_element(s.runs.begin(), s.runs.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

namespace {

int resolve_clusters(const Labels& truth, const EvalOptions& options) {
    if (options.clusters > 0) return options.clusters;
    Labels distinct = truth;
    std::sort(distinct.begin(), distinct.end());
    return static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
}

struct RunScores {
    double nmi, acc, purity, sse;
    Labels labels;
};

RunScores score_run(const Matrix& embedding, const Labels& truth, int k, int restarts, std::uint64_t seed) {
    KMeansResult km = kmeans(embedding, k, restarts, seed);
    return {nmi(km.labels, truth), acc(km.labels, truth), purity(km.labels, truth), km.sse, std::move(km.labels)};
}

ClusteringReport summarize(std::vector<RunScores>& runs, int k) {
    ClusteringReport report;
    std::vector<double> n, a, p;
    double best_sse = std::numeric_limits<double>::infinity();
    for (auto& r : runs) {
        n.push_back(r.nmi);
        a.push_back(r.acc);
        p.push_back(r.purity);
        if (r.sse < best_sse) {
            best_sse = r.sse;
            report.best_assignment = r.labels;
        }
    }
    report.nmi = MetricSummary::of(std::move(n));
    report.acc = MetricSummary::of(std::move(a));
    report.purity = MetricSummary::of(std::move(p));
    report.clusters = k;
    report.repeats = static_cast<int>(runs.size());
    return report;
}

}  // namespace

ClusteringReport evaluate_embedding(const Matrix& embedding, const Labels& truth, const EvalOptions& options) {
    if (truth.empty()) throw InvalidArgument("evaluation requires ground-truth labels");
    if (static_cast<Eigen::Index>(truth.size()) != embedding.rows()) {
        throw InvalidArgument("embedding rows and labels differ in length");
    }
    if (options.repeats < 1) throw InvalidArgument("repeat count must be at least 1");
    const int k = resolve_clusters(truth, options);
    std::vector<RunScores> runs;
    for (int r = 0; r < options.repeats; ++r) {
        runs.push_back(score_run(embedding, truth, k, options.restarts,
                                 derive_seed(options.seed, static_cast<std::uint64_t>(r))));
    }
    return summarize(runs, k);
}

ClusteringReport fit_and_evaluate(const MultiViewDataset& dataset, const Hyperparams& hp, const EvalOptions& options,
                                  bool refit, FittedModel* first_model) {
    if (!dataset.has_labels()) throw InvalidArgument("evaluation requires ground-truth labels");
    FittedModel model = fit(dataset, hp);
    ClusteringReport report;
    if (!refit) {
        report = evaluate_embedding(embed(dataset, model).data, dataset.labels, options);
    } else {
        if (options.repeats < 1) throw InvalidArgument("repeat count must be at least 1");
        const int k = resolve_clusters(dataset.labels, options);
        std::vector<RunScores> runs;
        for (int r = 0; r < options.repeats; ++r) {
            Hyperparams rhp = hp;
            rhp.seed = r == 0 ? hp.seed : derive_seed(hp.seed, static_cast<std::uint64_t>(r));
            const FittedModel m = r == 0 ? model : fit(dataset, rhp);
            runs.push_back(score_run(embed(dataset, m).data, dataset.labels, k, options.restarts,
                                     derive_seed(options.seed, static_cast<std::uint64_t>(r))));
        }
        report = summarize(runs, k);
    }
    if (first_model) *first_model = std::move(model);
    return report;
}

std::vector<double> powers_of_two(int lo, int hi) {
    std::vector<double> out;
    for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

std::vector<GridPoint> cartesian_grid(const std::vector<double>& alphas, const std::vector<double>& betas,
                                      const std::vector<double>& gammas, const std::vector<double>& deltas) {
    std::vector<GridPoint> grid;
    for (double a : alphas)
        for (double b : betas)
            for (double g : gammas)
                for (double d : deltas) grid.push_back({a, b, g, d});
    return grid;
}

GridResult grid_search(const MultiViewDataset& dataset, const Hyperparams& base, const std::vector<GridPoint>& grid,
                       const GridOptions& options) {
    if (grid.empty()) throw InvalidArgument("hyperparameter grid is empty");
    if (!dataset.has_labels()) throw InvalidArgument("grid search requires ground-truth labels");
    GridResult result;
    result.rows.resize(grid.size());

    auto run_point = [&](std::size_t i) {
        GridRow& row = result.rows[i];
        row.point = grid[i];
        Hyperparams hp = base;
        hp.alpha = grid[i].alpha;
        hp.beta = grid[i].beta;
        hp.gamma = grid[i].gamma;
        hp.delta = grid[i].delta;
        try {
            row.report = fit_and_evaluate(dataset, hp, options.eval, options.refit);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, options.threads));
    if (threads == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < grid.size(); i += threads) run_point(i);
            });
        }
    }

    auto pick = [&](auto metric) {
        int best = -1;
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            if (!result.rows[i].ok) continue;
            if (best < 0 || metric(result.rows[i].report) > metric(result.rows[static_cast<std::size_t>(best)].report)) {
                best = static_cast<int>(i);
            }
        }
        return best;
    };
    result.best_nmi = pick([](const ClusteringReport& r) { return r.nmi.mean; });
    result.best_acc = pick([](const ClusteringReport& r) { return r.acc.mean; });
    result.best_purity = pick([](const ClusteringReport& r) { return r.purity.mean; });
    return result;
}

std::vector<AblationRow> ablate(const MultiViewDataset& dataset, const Hyperparams& hp, const EvalOptions& options) {
    std::vector<AblationRow> rows;
    for (Variant variant : {Variant::Full, Variant::CommonOnly, Variant::NoConsistency}) {
        Hyperparams vhp = hp;
        vhp.variant = variant;
        FittedModel model;
        AblationRow row;
        row.variant = variant;
        row.report = fit_and_evaluate(dataset, vhp, options, false, &model);
        row.trace = std::move(model.trace);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace mvfs
