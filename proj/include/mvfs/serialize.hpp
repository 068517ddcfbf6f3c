#pragma once

#include "mvfs/evaluation.hpp"
#include "mvfs/representation.hpp"
#include "mvfs/solver.hpp"

#include <string>
#include <vector>

namespace mvfs {

inline constexpr int kModelFormatVersion = 1;

// Machine outputs carry doubles at full round-trip precision; wall time is
// never serialised so identical runs produce identical bytes.

std::string hyperparams_to_json(const Hyperparams& hp);

std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);

/// iteration,total,graph,orthogonality,consistency,b_sparsity,pc_sparsity,ps_sparsity,entropy
std::string trace_to_csv(const FitTrace& trace);

std::string report_to_json(const ClusteringReport& report);

std::string grid_to_csv(const GridResult& result);
std::string grid_summary_json(const GridResult& result);

std::string rules_to_json(const RuleBaseExport& rules);
RuleBaseExport rules_from_json(const std::string& text);

std::string ablation_to_csv(const std::vector<AblationRow>& rows);
/// Human table, metrics as mean±std with 4 decimals.
std::string ablation_table(const std::vector<AblationRow>& rows);

}  // namespace mvfs
