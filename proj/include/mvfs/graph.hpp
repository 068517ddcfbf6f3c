#pragma once

#include "mvfs/types.hpp"

namespace mvfs {

inline constexpr int kDefaultNeighbors = 5;

/// Bandwidth <= 0 selects the median of the non-zero kNN distances.
struct KnnOptions {
    int neighbors = kDefaultNeighbors;
    double bandwidth = 0.0;
};

struct GraphLaplacian {
    Matrix similarity;
    Vector degree;
    Matrix laplacian;
};

/// Directed kNN Gaussian affinities: row i holds exp(-|x_i - x_j|^2 / 2s^2)
/// for the k nearest j of i (ties to the lower index), zero elsewhere.
/// `bandwidth_used` receives the sigma actually applied.
Matrix knn_affinity(const Matrix& points, const KnnOptions& options, double* bandwidth_used = nullptr);

/// Symmetrised (S + S^T)/2 of knn_affinity with a zero diagonal.
Matrix knn_similarity(const Matrix& points, const KnnOptions& options, double* bandwidth_used = nullptr);

/// D - S. Throws InvalidArgument when S is asymmetric beyond 1e-10 or negative.
GraphLaplacian laplacian(const Matrix& similarity);

}  // namespace mvfs
