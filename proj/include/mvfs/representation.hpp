#pragma once

#include "mvfs/antecedent.hpp"
#include "mvfs/solver.hpp"
#include "mvfs/types.hpp"

#include <string>
#include <vector>

namespace mvfs {

/// [common | specific_1 | ... | specific_V], each block m columns wide.
struct Embedding {
    Matrix data;
    std::vector<std::string> blocks;
    int block_dim = 0;
};

/// Z = [sum_v w_v Xg_v Pc_v, w_1 Xg_1 Ps_1, ..., w_V Xg_V Ps_V].
Embedding embed_fuzzy(const std::vector<Matrix>& fuzzy_views, const ModelState& state);

/// Maps raw views through the fitted antecedents (training statistics) and
/// assembles the embedding. Throws InvalidState for an unfitted model.
Embedding embed(const MultiViewDataset& dataset, const FittedModel& model);

/// Per-rule label for one feature, ranked by ascending center with ties to
/// the lower rule index: Low/Middle/High for three rules, "Level k" otherwise.
std::vector<std::string> linguistic_labels(const Vector& centers);

struct RuleClause {
    std::string label;
    double center = 0.0;
    double width = 0.0;
};

/// Consequent tables are (d+1) x m: row 0 holds intercepts, row j+1 the
/// coefficient of standardised feature j.
struct FuzzyRule {
    std::vector<RuleClause> clauses;
    Matrix common;
    Matrix specific;
};

struct ViewRuleBase {
    int view = 0;
    double weight = 0.0;
    Standardizer standardizer;
    std::vector<FuzzyRule> rules;
};

struct RuleBaseExport {
    int dim = 0;
    std::vector<ViewRuleBase> views;
};

RuleBaseExport export_rules(const FittedModel& model);

/// Plain-text rule listing, coefficients rounded to 4 decimals.
std::string format_rules(const RuleBaseExport& rules);

/// Multi-output TSK inference with the exported rules, on raw view rows.
/// Returns rows laid out like the embedding.
Matrix infer_rules(const RuleBaseExport& rules, const std::vector<Matrix>& raw_views);

}  // namespace mvfs
