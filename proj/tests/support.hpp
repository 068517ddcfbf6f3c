// Shared fixtures and independent reference implementations for the tests.
#pragma once

#include "mvfs/antecedent.hpp"
#include "mvfs/graph.hpp"
#include "mvfs/solver.hpp"
#include "mvfs/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace testing {

using mvfs::Matrix;
using mvfs::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
    return m;
}

inline mvfs::MultiViewDataset random_dataset(std::mt19937_64& rng, int n, const std::vector<int>& dims,
                                             int classes) {
    mvfs::MultiViewDataset ds;
    for (std::size_t v = 0; v < dims.size(); ++v) ds.views.push_back({random_matrix(rng, n, dims[v]), int(v)});
    for (int c = 0; c < classes; ++c) ds.class_names.push_back(std::to_string(c));
    for (int i = 0; i < n; ++i) ds.labels.push_back(i % classes);
    return ds;
}

// Small problem with a state that has been through a few iterations, so
// no block sits at a special point.
struct SmallProblem {
    mvfs::Hyperparams hp;
    mvfs::Problem problem;
    mvfs::ModelState state;
};

inline SmallProblem small_problem(std::uint64_t seed, int n = 10, int views = 2, int m = 2, int rules = 2,
                                  int warm_iters = 2) {
    std::mt19937_64 rng(seed);
    std::vector<int> dims;
    for (int v = 0; v < views; ++v) dims.push_back(2 + v);
    auto ds = random_dataset(rng, n, dims, m);
    SmallProblem sp;
    sp.hp.dim = m;
    sp.hp.rules = rules;
    sp.hp.neighbors = 3;
    sp.hp.max_iter = warm_iters;
    sp.hp.seed = seed;
    std::uniform_real_distribution<double> u(0.2, 2.0);
    sp.hp.alpha = u(rng);
    sp.hp.beta = u(rng);
    sp.hp.gamma = u(rng);
    sp.hp.delta = u(rng);
    std::vector<mvfs::ViewAntecedent> ants;
    sp.problem = mvfs::prepare(ds, sp.hp, ants);
    sp.state = mvfs::initialize(sp.problem, sp.hp);
    mvfs::FitTrace trace;
    mvfs::optimize(sp.state, sp.problem, sp.hp, trace);
    return sp;
}

// ---- objective, written with explicit scalar loops ----

inline double loop_trace_quadratic(const Matrix& z, const Matrix& lap) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < z.cols(); ++c)
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            for (Eigen::Index j = 0; j < z.rows(); ++j) s += z(i, c) * lap(i, j) * z(j, c);
    return s;
}

inline Matrix loop_product(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double loop_l21(const Matrix& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double r = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) r += m(i, j) * m(i, j);
        s += std::sqrt(r);
    }
    return s;
}

inline double loop_objective(const mvfs::ModelState& st, const mvfs::Problem& pr, const mvfs::Hyperparams& hp) {
    double total = 0.0;
    const auto m = st.pc.front().cols();
    for (std::size_t v = 0; v < pr.views.size(); ++v) {
        const Matrix& x = pr.views[v].xg;
        const Matrix zc = loop_product(x, st.pc[v]);
        const Matrix zs = loop_product(x, st.ps[v]);
        const double w = st.w(Eigen::Index(v));
        total += w * loop_trace_quadratic(zc + zs, pr.views[v].lap);
        double orth = 0.0;
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) {
                double s = 0.0;
                for (Eigen::Index i = 0; i < x.rows(); ++i) s += zc(i, a) * zs(i, b);
                orth += s * s;
            }
        total += hp.alpha * orth;
        double cons = 0.0;
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) {
                double s = 0.0;
                for (Eigen::Index i = 0; i < x.rows(); ++i) s += st.b(a, i) * zc(i, b);
                const double r = s - (a == b ? 1.0 : 0.0);
                cons += r * r;
            }
        total += hp.beta * cons;
        total += hp.gamma * (loop_l21(st.pc[v]) + loop_l21(st.ps[v]));
        if (w > 0.0) total += hp.delta * w * std::log(w);
    }
    total += hp.gamma * loop_l21(st.b);
    return total;
}

// ---- pairwise smoothness ----

inline double pairwise_smoothness(const Matrix& s, const Matrix& z) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            double d = 0.0;
            for (Eigen::Index c = 0; c < z.cols(); ++c) d += (z(i, c) - z(j, c)) * (z(i, c) - z(j, c));
            total += s(i, j) * d;
        }
    return 0.5 * total;
}

// ---- reweighted surrogates, built from explicit products ----

inline double pc_surrogate(const mvfs::ModelState& st, std::size_t v, const mvfs::Problem& pr,
                           const mvfs::Hyperparams& hp, const Matrix& pc, const Vector& fc) {
    const Matrix& x = pr.views[v].xg;
    const Matrix zc = x * pc;
    const Matrix zs = x * st.ps[v];
    const Matrix z = zc + zs;
    const auto m = pc.cols();
    double f = st.w(Eigen::Index(v)) * (z.transpose() * pr.views[v].lap * z).trace();
    f += hp.alpha * (zc.transpose() * zs).squaredNorm();
    f += hp.beta * (st.b * zc - Matrix::Identity(m, m)).squaredNorm();
    for (Eigen::Index i = 0; i < pc.rows(); ++i) f += hp.gamma * fc(i) * pc.row(i).squaredNorm();
    return f;
}

inline double ps_surrogate(const mvfs::ModelState& st, std::size_t v, const mvfs::Problem& pr,
                           const mvfs::Hyperparams& hp, const Matrix& ps, const Vector& fs) {
    const Matrix& x = pr.views[v].xg;
    const Matrix zc = x * st.pc[v];
    const Matrix zs = x * ps;
    const Matrix z = zc + zs;
    double f = st.w(Eigen::Index(v)) * (z.transpose() * pr.views[v].lap * z).trace();
    f += hp.alpha * (zc.transpose() * zs).squaredNorm();
    for (Eigen::Index i = 0; i < ps.rows(); ++i) f += hp.gamma * fs(i) * ps.row(i).squaredNorm();
    return f;
}

inline double b_surrogate(const mvfs::ModelState& st, const mvfs::Problem& pr, const mvfs::Hyperparams& hp,
                          const Matrix& b, const Vector& fb) {
    const auto m = b.rows();
    double f = 0.0;
    for (std::size_t v = 0; v < pr.views.size(); ++v) {
        f += (b * (pr.views[v].xg * st.pc[v]) - Matrix::Identity(m, m)).squaredNorm();
    }
    for (Eigen::Index i = 0; i < m; ++i) f += hp.gamma * fb(i) * b.row(i).squaredNorm();
    return f;
}

inline Matrix central_difference(const std::function<double(const Matrix&)>& f, const Matrix& at, double h) {
    Matrix g(at.rows(), at.cols());
    for (Eigen::Index i = 0; i < at.rows(); ++i)
        for (Eigen::Index j = 0; j < at.cols(); ++j) {
            Matrix p = at, q = at;
            p(i, j) += h;
            q(i, j) -= h;
            g(i, j) = (f(p) - f(q)) / (2.0 * h);
        }
    return g;
}

// ---- clustering metric oracles ----

inline std::vector<int> distinct(const std::vector<int>& v) {
    std::set<int> s(v.begin(), v.end());
    return {s.begin(), s.end()};
}

// Best accuracy over every injective relabelling of predicted clusters.
inline double acc_bruteforce(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto pc = distinct(pred);
    const auto tc = distinct(truth);
    const std::size_t k = std::max(pc.size(), tc.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto p = std::size_t(std::lower_bound(pc.begin(), pc.end(), pred[i]) - pc.begin());
            const auto slot = std::size_t(perm[p]);
            if (slot < tc.size() && tc[slot] == truth[i]) ++hits;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return double(best) / double(pred.size());
}

inline std::map<std::pair<int, int>, double> contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::map<std::pair<int, int>, double> c;
    for (std::size_t i = 0; i < pred.size(); ++i) c[{pred[i], truth[i]}] += 1.0;
    return c;
}

inline double nmi_contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
    const double n = double(pred.size());
    std::map<int, double> a, b;
    for (int p : pred) a[p] += 1.0;
    for (int t : truth) b[t] += 1.0;
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (const auto& [k, c] : a) ha -= c / n * std::log(c / n);
    for (const auto& [k, c] : b) hb -= c / n * std::log(c / n);
    for (const auto& [key, c] : contingency(pred, truth)) {
        mi += c / n * std::log(c * n / (a[key.first] * b[key.second]));
    }
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;
    return mi / std::sqrt(ha * hb);
}

inline double purity_contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::map<int, double> best;
    for (const auto& [key, c] : contingency(pred, truth)) best[key.first] = std::max(best[key.first], c);
    double s = 0.0;
    for (const auto& [k, c] : best) s += c;
    return s / double(pred.size());
}

}  // namespace testing
