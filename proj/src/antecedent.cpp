#include "mvfs/antecedent.hpp"

#include "mvfs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mvfs {

namespace {

void warn(std::vector<std::string>* sink, std::string message) {
    if (sink) sink->push_back(std::move(message));
}

struct Cluster {
    std::vector<Eigen::Index> members;
    RowVector mean;
    double sse = 0.0;
};

void summarize(const Matrix& x, Cluster& c) {
    c.mean = RowVector::Zero(x.cols());
    for (auto i : c.members) c.mean += x.row(i);
    c.mean /= static_cast<double>(c.members.size());
    c.sse = 0.0;
    for (auto i : c.members) c.sse += (x.row(i) - c.mean).squaredNorm();
}

// Splits `c` along its highest-variance feature. Returns false when every
// feature is constant inside the cluster or rounding leaves one side empty.
bool try_split(const Matrix& x, const Cluster& c, Cluster& left, Cluster& right) {
    if (c.members.size() < 2 || !(c.sse > 0.0)) return false;
    Eigen::Index best_feature = -1;
    double best_spread = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double spread = 0.0;
        for (auto i : c.members) {
            const double d = x(i, j) - c.mean(j);
            spread += d * d;
        }
        if (spread > best_spread) {
            best_spread = spread;
            best_feature = j;
        }
    }
    if (best_feature < 0) return false;
    const double pivot = c.mean(best_feature);
    left.members.clear();
    right.members.clear();
    for (auto i : c.members) {
        (x(i, best_feature) < pivot ? left.members : right.members).push_back(i);
    }
    if (left.members.empty() || right.members.empty()) return false;
    summarize(x, left);
    summarize(x, right);
    return true;
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean();
    s.scale = RowVector::Zero(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
        const double sd = std::sqrt(var);
        s.scale(j) = sd > 0.0 ? 1.0 / sd : 0.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != mean.size()) {
        throw InvalidArgument("standardizer expects " + std::to_string(mean.size()) + " columns, got " +
                              std::to_string(x.cols()));
    }
    return (x.rowwise() - mean).array().rowwise() * scale.array();
}

Matrix varpart_centers(const Matrix& x, int rules, std::vector<std::string>* warnings) {
    if (rules < 1) throw InvalidArgument("rule count must be at least 1");
    if (rules > x.rows()) {
        throw InvalidArgument("rule count " + std::to_string(rules) + " exceeds instance count " +
                              std::to_string(x.rows()));
    }
    if (!x.allFinite()) throw InvalidArgument("view contains non-finite entries");

    std::vector<Cluster> clusters(1);
    clusters[0].members.resize(static_cast<std::size_t>(x.rows()));
    std::iota(clusters[0].members.begin(), clusters[0].members.end(), Eigen::Index{0});
    summarize(x, clusters[0]);

    std::vector<RowVector> duplicates;
    for (int split = 1; split < rules; ++split) {
        std::vector<std::size_t> order(clusters.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return clusters[a].sse > clusters[b].sse; });
        bool done = false;
        for (auto idx : order) {
            Cluster left, right;
            if (try_split(x, clusters[idx], left, right)) {
                clusters[idx] = std::move(left);
                clusters.push_back(std::move(right));
                done = true;
                break;
            }
        }
        if (!done) {
            duplicates.push_back(clusters[order.front()].mean);
            warn(warnings, "var-part: no splittable cluster left; duplicated a center to reach " +
                               std::to_string(rules) + " rules");
        }
    }

    Matrix centers(rules, x.cols());
    Eigen::Index k = 0;
    for (const auto& c : clusters) centers.row(k++) = c.mean;
    for (const auto& d : duplicates) centers.row(k++) = d;
    return centers;
}

Matrix estimate_widths(const Matrix& x, const Matrix& centers, std::vector<std::string>* warnings) {
    if (centers.cols() != x.cols()) throw InvalidArgument("centers and data disagree on feature count");
    const Eigen::Index rules = centers.rows();
    Matrix widths(rules, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < rules; ++k) {
            widths(k, j) = (x.col(j).array() - centers(k, j)).square().sum();
            total += widths(k, j);
        }
        if (!(total > 0.0)) {
            widths.col(j).setConstant(kWidthFloor);
            warn(warnings, "width: feature " + std::to_string(j) + " is constant at every center; floored");
            continue;
        }
        for (Eigen::Index k = 0; k < rules; ++k) widths(k, j) = std::max(widths(k, j) / total, kWidthFloor);
    }
    return widths;
}

Vector log_firing_levels(const Eigen::Ref<const RowVector>& x, const AntecedentBank& bank) {
    if (x.size() != bank.centers.cols()) throw InvalidArgument("input row does not match antecedent dimension");
    if (!x.allFinite()) throw InvalidArgument("non-finite input to firing levels");
    Vector log_mu(bank.centers.rows());
    for (Eigen::Index k = 0; k < bank.centers.rows(); ++k) {
        log_mu(k) = -0.5 * ((x - bank.centers.row(k)).array().square() / bank.widths.row(k).array()).sum();
    }
    return log_mu;
}

Vector firing_levels(const Eigen::Ref<const RowVector>& x, const AntecedentBank& bank) {
    Vector mu = log_firing_levels(x, bank);
    mu = (mu.array() - mu.maxCoeff()).exp();
    return mu / mu.sum();
}

Matrix fuzzy_map(const Matrix& x, const AntecedentBank& bank) {
    if (x.cols() != bank.centers.cols()) {
        throw InvalidArgument("fuzzy_map: data has " + std::to_string(x.cols()) + " columns, bank expects " +
                              std::to_string(bank.centers.cols()));
    }
    const Eigen::Index rules = bank.centers.rows();
    const Eigen::Index block = x.cols() + 1;
    Matrix out(x.rows(), rules * block);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Vector mu = firing_levels(x.row(i), bank);
        for (Eigen::Index k = 0; k < rules; ++k) {
            out(i, k * block) = mu(k);
            out.row(i).segment(k * block + 1, x.cols()) = mu(k) * x.row(i);
        }
    }
    return out;
}

ViewAntecedent ViewAntecedent::estimate(const Matrix& raw, int rules, std::vector<std::string>* warnings) {
    ViewAntecedent va;
    va.standardizer = Standardizer::fit(raw);
    const Matrix z = va.standardizer.apply(raw);
    va.bank.centers = varpart_centers(z, rules, warnings);
    va.bank.widths = estimate_widths(z, va.bank.centers, warnings);
    return va;
}

Matrix ViewAntecedent::transform(const Matrix& raw) const {
    return fuzzy_map(standardizer.apply(raw), bank);
}

}  // namespace mvfs
