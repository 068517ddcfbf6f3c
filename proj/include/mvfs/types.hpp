#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace mvfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Labels = std::vector<int>;

/// Instances of one view: N rows by d_v feature columns.
struct ViewMatrix {
    Matrix data;
    int view_id = 0;
};

/// Views share the instance axis. Labels are dense class indices in
/// [0, class_count); `class_names` keeps the identifiers read from disk.
struct MultiViewDataset {
    std::vector<ViewMatrix> views;
    Labels labels;
    std::vector<std::string> class_names;

    std::size_t instances() const { return views.empty() ? 0 : static_cast<std::size_t>(views.front().data.rows()); }
    std::size_t view_count() const { return views.size(); }
    bool has_labels() const { return !labels.empty(); }
    std::size_t class_count() const { return class_names.size(); }
};

/// Throws InvalidArgument when views disagree on N, N < 2, a view has no
/// columns, an entry is non-finite, or labels have the wrong length.
void validate(const MultiViewDataset& dataset);

}  // namespace mvfs
