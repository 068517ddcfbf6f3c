#pragma once

#include "mvfs/types.hpp"

#include <string>
#include <vector>

namespace mvfs {

inline constexpr double kWidthFloor = 1e-8;

/// Per-column z-score statistics. Columns with zero spread get scale 0, so
/// they map to 0 for any input.
struct Standardizer {
    RowVector mean;
    RowVector scale;  // 1/std, or 0 for constant columns

    static Standardizer fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;
};

/// Gaussian IF-parts of K rules over one view: centers E and widths Q (K x d).
struct AntecedentBank {
    Matrix centers;
    Matrix widths;

    int rule_count() const { return static_cast<int>(centers.rows()); }
    int input_dim() const { return static_cast<int>(centers.cols()); }
};

/// Var-Part centers: start from one cluster holding all rows and split the
/// largest-SSE cluster K-1 times along its highest-variance feature at that
/// feature's mean. Pure and deterministic.
Matrix varpart_centers(const Matrix& x, int rules, std::vector<std::string>* warnings = nullptr);

/// q_kj = sum_i (x_ij - e_kj)^2 / sum_l sum_i (x_ij - e_lj)^2, floored at
/// kWidthFloor. A column with zero denominator gets kWidthFloor throughout.
Matrix estimate_widths(const Matrix& x, const Matrix& centers, std::vector<std::string>* warnings = nullptr);

/// Unnormalised log-firing level of each rule for one input row.
Vector log_firing_levels(const Eigen::Ref<const RowVector>& x, const AntecedentBank& bank);

/// Normalised firing levels, computed in the log domain; sums to 1.
Vector firing_levels(const Eigen::Ref<const RowVector>& x, const AntecedentBank& bank);

/// Row i becomes [mu_1(x_i) [1, x_i], ..., mu_K(x_i) [1, x_i]].
Matrix fuzzy_map(const Matrix& x, const AntecedentBank& bank);

/// Everything needed to push raw rows of one view into fuzzy feature space.
struct ViewAntecedent {
    Standardizer standardizer;
    AntecedentBank bank;

    static ViewAntecedent estimate(const Matrix& raw, int rules, std::vector<std::string>* warnings = nullptr);
    Matrix transform(const Matrix& raw) const;
    int fuzzy_dim() const { return bank.rule_count() * (bank.input_dim() + 1); }
};

}  // namespace mvfs
