#include "mvfs/graph.hpp"

#include "mvfs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace mvfs {

Matrix knn_affinity(const Matrix& points, const KnnOptions& options, double* bandwidth_used) {
    const Eigen::Index n = points.rows();
    const int k = options.neighbors;
    if (k < 1 || k >= n) {
        throw InvalidArgument("neighbor count " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + ")");
    }

    // Direct differences rather than the |a|^2 + |b|^2 - 2ab expansion, so
    // coincident points come out at exactly zero distance.
    Matrix sq_dist = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            sq_dist(i, j) = sq_dist(j, i) = (points.row(i) - points.row(j)).squaredNorm();
        }
    }

    std::vector<std::vector<Eigen::Index>> neighbors(static_cast<std::size_t>(n));
    std::vector<double> nonzero;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        order.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) order.push_back(j);
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return sq_dist(i, a) < sq_dist(i, b); });
        auto& nb = neighbors[static_cast<std::size_t>(i)];
        nb.assign(order.begin(), order.begin() + k);
        for (auto j : nb) {
            if (sq_dist(i, j) > 0.0) nonzero.push_back(std::sqrt(sq_dist(i, j)));
        }
    }

    double sigma = options.bandwidth;
    if (!(sigma > 0.0)) {
        if (nonzero.empty()) {
            sigma = 1.0;
        } else {
            std::sort(nonzero.begin(), nonzero.end());
            const std::size_t mid = nonzero.size() / 2;
            sigma = nonzero.size() % 2 ? nonzero[mid] : 0.5 * (nonzero[mid - 1] + nonzero[mid]);
        }
    }
    if (bandwidth_used) *bandwidth_used = sigma;

    Matrix s = Matrix::Zero(n, n);
    const double denom = 2.0 * sigma * sigma;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (auto j : neighbors[static_cast<std::size_t>(i)]) s(i, j) = std::exp(-sq_dist(i, j) / denom);
    }
    return s;
}

Matrix knn_similarity(const Matrix& points, const KnnOptions& options, double* bandwidth_used) {
    const Matrix directed = knn_affinity(points, options, bandwidth_used);
    Matrix s = 0.5 * (directed + directed.transpose());
    s.diagonal().setZero();
    return s;
}

GraphLaplacian laplacian(const Matrix& similarity) {
    if (similarity.rows() != similarity.cols()) throw InvalidArgument("similarity matrix must be square");
    if ((similarity - similarity.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgument("similarity matrix is not symmetric");
    }
    if (similarity.size() > 0 && similarity.minCoeff() < 0.0) {
        throw InvalidArgument("similarity matrix has negative entries");
    }
    GraphLaplacian g;
    g.similarity = similarity;
    g.degree = similarity.rowwise().sum();
    g.laplacian = -similarity;
    g.laplacian.diagonal() += g.degree;
    return g;
}

}  // namespace mvfs
