#pragma once

#include "mvfs/antecedent.hpp"
#include "mvfs/graph.hpp"
#include "mvfs/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mvfs {

enum class BUpdateMode {
    PaperFaithful,  // closed form (I + gamma F_b)^-1 sum_v Z_c^T
    ExactSolve,     // true minimiser of the reweighted consistency surrogate
};

enum class Variant {
    Full,
    CommonOnly,     // no specific consequents
    NoConsistency,  // no mapping B, no consistency or B-sparsity terms
};

std::string to_string(BUpdateMode mode);
std::string to_string(Variant variant);
BUpdateMode parse_b_mode(const std::string& text);
Variant parse_variant(const std::string& text);

inline constexpr double kIrlsFloor = 1e-8;
inline constexpr double kStopTolerance = 1e-6;
inline constexpr int kDefaultIterations = 100;
inline constexpr int kDefaultRules = 3;
inline constexpr double kRidge = 1e-10;

struct Hyperparams {
    double alpha = 1.0;  // orthogonality between common and specific blocks
    double beta = 1.0;   // consistency regression
    double gamma = 1.0;  // L2,1 sparsity on B, P_c, P_s
    double delta = 1.0;  // entropy on view weights
    int rules = kDefaultRules;
    int dim = 0;  // 0: resolve to the class count at fit time
    int max_iter = kDefaultIterations;
    int neighbors = kDefaultNeighbors;
    double bandwidth = 0.0;  // <= 0: auto
    double eps_irls = kIrlsFloor;
    double tol_stop = kStopTolerance;
    std::uint64_t seed = 0;
    BUpdateMode b_mode = BUpdateMode::PaperFaithful;
    Variant variant = Variant::Full;

    void validate() const;
};

/// Per-view data that stays fixed during optimisation, with the Gram
/// products every update reuses.
struct ViewProblem {
    Matrix xg;      // N x d_g
    Matrix lap;     // N x N
    Matrix xt_l_x;  // Xg^T L Xg
    Matrix xt_x;    // Xg^T Xg

    static ViewProblem make(Matrix xg, const GraphLaplacian& graph);
};

struct Problem {
    std::vector<ViewProblem> views;

    std::size_t view_count() const { return views.size(); }
    Eigen::Index instances() const { return views.empty() ? 0 : views.front().xg.rows(); }
};

struct ModelState {
    std::vector<Matrix> pc;  // d_g^v x m
    std::vector<Matrix> ps;  // d_g^v x m
    Matrix b;                // m x N
    Vector w;                // view weights on the simplex

    int dim() const { return pc.empty() ? 0 : static_cast<int>(pc.front().cols()); }
};

struct ObjectiveTerms {
    double graph = 0.0;
    double orthogonality = 0.0;
    double consistency = 0.0;
    double b_sparsity = 0.0;
    double pc_sparsity = 0.0;
    double ps_sparsity = 0.0;
    double entropy = 0.0;

    double total() const {
        return graph + orthogonality + consistency + b_sparsity + pc_sparsity + ps_sparsity + entropy;
    }
};

struct TraceEntry {
    int iteration = 0;
    ObjectiveTerms terms;
    double total = 0.0;
    std::vector<double> weights;
    double wall_seconds = 0.0;
};

using FitTrace = std::vector<TraceEntry>;

enum class Substep { Mapping, Common, Specific, Weights };

/// Value of a sub-step's own surrogate (IRLS diagonals frozen) before and
/// after the update. `exact` is false for the closed-form B update, which
/// does not minimise its surrogate.
struct SubstepCheck {
    int iteration = 0;
    int view = -1;
    Substep step = Substep::Common;
    bool exact = true;
    double before = 0.0;
    double after = 0.0;

    bool descended(double rel_tol = 1e-9) const {
        return after <= before + rel_tol * std::max(1.0, std::abs(before));
    }
};

double l21_norm(const Matrix& m);

/// Diagonal of the IRLS reweighting: 1 / max(|row_i|, eps).
Vector irls_diag(const Matrix& m, double eps);

/// tr(Z^T L Z) with Z = Xg (P_c + P_s) for one view.
double graph_smoothness(const ModelState& state, std::size_t view, const Problem& problem);

ObjectiveTerms objective(const ModelState& state, const Problem& problem, const Hyperparams& hp);

// Reweighted quadratic surrogates each update minimises. The L2,1 terms are
// replaced by gamma tr(P^T F P) with F frozen.
double common_surrogate(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                        const Vector& fc);
double specific_surrogate(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                          const Vector& fs);
double mapping_surrogate(const ModelState& state, const Problem& problem, const Hyperparams& hp, const Vector& fb);
double weights_objective(const ModelState& state, const Problem& problem, const Hyperparams& hp);

Matrix update_common(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                     const Vector& fc);
Matrix update_common(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp);
Matrix update_specific(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                       const Vector& fs);
Matrix update_specific(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp);
Matrix update_mapping(const ModelState& state, const Problem& problem, const Hyperparams& hp, const Vector& fb);
Matrix update_mapping(const ModelState& state, const Problem& problem, const Hyperparams& hp);
Vector update_weights(const ModelState& state, const Problem& problem, const Hyperparams& hp);

struct FitOptions {
    bool record_substeps = false;
};

struct FittedModel {
    Hyperparams hp;
    std::vector<ViewAntecedent> antecedents;
    ModelState state;
    FitTrace trace;
    std::vector<SubstepCheck> substeps;
    std::vector<std::string> warnings;
    int iterations = 0;
    bool converged = false;
};

/// Resolves dim from the labels when unset, estimates antecedents, maps every
/// view into fuzzy feature space and builds the fixed kNN graphs.
Problem prepare(const MultiViewDataset& dataset, Hyperparams& hp, std::vector<ViewAntecedent>& antecedents,
                std::vector<std::string>* warnings = nullptr);

/// Seeded random consequents, uniform weights and the first B (F_b = I).
ModelState initialize(const Problem& problem, const Hyperparams& hp);

/// Alternating minimisation from `state`: B, then per view P_c, P_s, w.
/// trace[0] is the objective at entry; one entry follows per iteration.
void optimize(ModelState& state, const Problem& problem, const Hyperparams& hp, FitTrace& trace,
              std::vector<SubstepCheck>* substeps = nullptr, int* iterations = nullptr, bool* converged = nullptr);

FittedModel fit(const MultiViewDataset& dataset, Hyperparams hp, const FitOptions& options = {});

}  // namespace mvfs
