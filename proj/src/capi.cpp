#include "mvfs/mvfs.h"

#include "mvfs/dataset.hpp"
#include "mvfs/errors.hpp"
#include "mvfs/evaluation.hpp"
#include "mvfs/representation.hpp"
#include "mvfs/serialize.hpp"
#include "mvfs/solver.hpp"
#include "mvfs/synth.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <new>
#include <string>

struct mvfs_dataset {
    mvfs::MultiViewDataset data;
};

struct mvfs_model {
    mvfs::FittedModel fitted;
};

namespace {

thread_local std::string g_last_error;

mvfs_status fail(mvfs_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <class F>
mvfs_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return MVFS_OK;
    } catch (const mvfs::NumericFailure& e) {
        return fail(MVFS_ERR_NUMERIC, e.what());
    } catch (const mvfs::ParseError& e) {
        return fail(MVFS_ERR_PARSE, e.what());
    } catch (const mvfs::LoadError& e) {
        return fail(MVFS_ERR_LOAD, e.what());
    } catch (const mvfs::InvalidState& e) {
        return fail(MVFS_ERR_INVALID_STATE, e.what());
    } catch (const mvfs::InvalidArgument& e) {
        return fail(MVFS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(MVFS_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MVFS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MVFS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MVFS_ERR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw mvfs::InvalidArgument(message);
}

mvfs::Hyperparams to_cpp(const mvfs_hyperparams& c) {
    mvfs::Hyperparams hp;
    hp.alpha = c.alpha;
    hp.beta = c.beta;
    hp.gamma = c.gamma;
    hp.delta = c.delta;
    hp.rules = c.rules;
    hp.dim = c.dim;
    hp.max_iter = c.max_iter;
    hp.neighbors = c.knn;
    hp.bandwidth = c.bandwidth;
    hp.eps_irls = c.eps_irls;
    hp.tol_stop = c.tol_stop;
    hp.seed = c.seed;
    require(c.b_mode == MVFS_B_PAPER || c.b_mode == MVFS_B_EXACT, "unknown b_mode");
    hp.b_mode = c.b_mode == MVFS_B_EXACT ? mvfs::BUpdateMode::ExactSolve : mvfs::BUpdateMode::PaperFaithful;
    switch (c.variant) {
        case MVFS_VARIANT_FULL: hp.variant = mvfs::Variant::Full; break;
        case MVFS_VARIANT_COMMON_ONLY: hp.variant = mvfs::Variant::CommonOnly; break;
        case MVFS_VARIANT_NO_CONSISTENCY: hp.variant = mvfs::Variant::NoConsistency; break;
        default: throw mvfs::InvalidArgument("unknown variant");
    }
    return hp;
}

mvfs_hyperparams to_c(const mvfs::Hyperparams& hp) {
    mvfs_hyperparams c{};
    c.alpha = hp.alpha;
    c.beta = hp.beta;
    c.gamma = hp.gamma;
    c.delta = hp.delta;
    c.rules = hp.rules;
    c.dim = hp.dim;
    c.max_iter = hp.max_iter;
    c.knn = hp.neighbors;
    c.bandwidth = hp.bandwidth;
    c.eps_irls = hp.eps_irls;
    c.tol_stop = hp.tol_stop;
    c.seed = hp.seed;
    c.b_mode = hp.b_mode == mvfs::BUpdateMode::ExactSolve ? MVFS_B_EXACT : MVFS_B_PAPER;
    c.variant = hp.variant == mvfs::Variant::CommonOnly      ? MVFS_VARIANT_COMMON_ONLY
                : hp.variant == mvfs::Variant::NoConsistency ? MVFS_VARIANT_NO_CONSISTENCY
                                                             : MVFS_VARIANT_FULL;
    return c;
}

mvfs::EvalOptions to_cpp(const mvfs_eval_options& c) {
    mvfs::EvalOptions o;
    o.repeats = c.repeats;
    o.restarts = c.restarts;
    o.seed = c.seed;
    o.clusters = c.clusters;
    return o;
}

mvfs_metric to_c(const mvfs::MetricSummary& s) { return {s.mean, s.stddev, s.min, s.max}; }

std::vector<double> list_or_default(const double* values, size_t n) {
    if (!values || n == 0) return mvfs::powers_of_two(-5, 5);
    return {values, values + n};
}

}  // namespace

extern "C" {

const char* mvfs_version(void) { return "1.0.0"; }

const char* mvfs_last_error(void) { return g_last_error.c_str(); }

const char* mvfs_status_name(mvfs_status status) {
    switch (status) {
        case MVFS_OK: return "ok";
        case MVFS_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case MVFS_ERR_PARSE: return "parse-error";
        case MVFS_ERR_LOAD: return "load-error";
        case MVFS_ERR_IO: return "io-error";
        case MVFS_ERR_NUMERIC: return "numeric-failure";
        case MVFS_ERR_INVALID_STATE: return "invalid-state";
        case MVFS_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

void mvfs_hyperparams_default(mvfs_hyperparams* hp) {
    if (hp) *hp = to_c(mvfs::Hyperparams{});
}

void mvfs_eval_options_default(mvfs_eval_options* options) {
    if (!options) return;
    *options = mvfs_eval_options{};
    options->repeats = mvfs::kDefaultRepeats;
    options->restarts = mvfs::kDefaultRestarts;
}

void mvfs_synth_params_default(mvfs_synth_params* params) {
    if (!params) return;
    const mvfs::SynthSpec spec;
    *params = mvfs_synth_params{};
    params->instances = spec.instances;
    params->views = spec.views;
    params->clusters = spec.clusters;
    params->noise = spec.noise;
    params->seed = spec.seed;
    params->separation = spec.separation;
    params->dims = nullptr;
}

mvfs_status mvfs_dataset_load(const char* const* view_paths, size_t view_count, const char* label_path,
                              int has_header, mvfs_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "output handle is null");
        require(view_paths != nullptr && view_count > 0, "at least one view path is required");
        std::vector<std::string> paths;
        for (size_t i = 0; i < view_count; ++i) {
            require(view_paths[i] != nullptr, "view path is null");
            paths.emplace_back(view_paths[i]);
        }
        std::optional<std::string> labels;
        if (label_path) labels = label_path;
        auto ds = std::make_unique<mvfs_dataset>();
        ds->data = mvfs::load_dataset(paths, labels, has_header != 0);
        *out = ds.release();
    });
}

mvfs_status mvfs_dataset_from_arrays(const double* const* views, const size_t* dims, size_t view_count,
                                     size_t instances, const int32_t* labels, mvfs_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "output handle is null");
        require(views != nullptr && dims != nullptr && view_count > 0, "views and dims are required");
        auto ds = std::make_unique<mvfs_dataset>();
        for (size_t v = 0; v < view_count; ++v) {
            require(views[v] != nullptr, "view buffer is null");
            using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            Eigen::Map<const RowMajor> map(views[v], static_cast<Eigen::Index>(instances),
                                           static_cast<Eigen::Index>(dims[v]));
            ds->data.views.push_back({mvfs::Matrix(map), static_cast<int>(v)});
        }
        if (labels) {
            std::map<int32_t, int> index;
            for (size_t i = 0; i < instances; ++i) {
                auto [it, inserted] = index.emplace(labels[i], static_cast<int>(ds->data.class_names.size()));
                if (inserted) ds->data.class_names.push_back(std::to_string(labels[i]));
                ds->data.labels.push_back(it->second);
            }
        }
        mvfs::validate(ds->data);
        *out = ds.release();
    });
}

mvfs_status mvfs_synth(const mvfs_synth_params* params, mvfs_dataset** out) {
    return guarded([&] {
        require(params != nullptr && out != nullptr, "null argument");
        mvfs::SynthSpec spec;
        spec.instances = params->instances;
        spec.views = params->views;
        spec.clusters = params->clusters;
        spec.noise = params->noise;
        spec.seed = params->seed;
        spec.separation = params->separation;
        if (params->dims) spec.dims.assign(params->dims, params->dims + std::max(0, params->views));
        auto ds = std::make_unique<mvfs_dataset>();
        ds->data = mvfs::synthesize(spec);
        *out = ds.release();
    });
}

mvfs_status mvfs_dataset_write(const mvfs_dataset* dataset, const char* dir) {
    return guarded([&] {
        require(dataset != nullptr && dir != nullptr, "null argument");
        mvfs::write_dataset(dataset->data, dir);
    });
}

void mvfs_dataset_free(mvfs_dataset* dataset) { delete dataset; }

size_t mvfs_dataset_instances(const mvfs_dataset* dataset) { return dataset ? dataset->data.instances() : 0; }

size_t mvfs_dataset_views(const mvfs_dataset* dataset) { return dataset ? dataset->data.view_count() : 0; }

size_t mvfs_dataset_view_dim(const mvfs_dataset* dataset, size_t view) {
    if (!dataset || view >= dataset->data.view_count()) return 0;
    return static_cast<size_t>(dataset->data.views[view].data.cols());
}

size_t mvfs_dataset_classes(const mvfs_dataset* dataset) { return dataset ? dataset->data.class_count() : 0; }

mvfs_status mvfs_fit(const mvfs_dataset* dataset, const mvfs_hyperparams* hp, mvfs_model** out) {
    return guarded([&] {
        require(dataset != nullptr && hp != nullptr && out != nullptr, "null argument");
        auto model = std::make_unique<mvfs_model>();
        model->fitted = mvfs::fit(dataset->data, to_cpp(*hp));
        *out = model.release();
    });
}

void mvfs_model_free(mvfs_model* model) { delete model; }

mvfs_status mvfs_model_save(const mvfs_model* model, const char* path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "null argument");
        mvfs::write_text(path, mvfs::model_to_json(model->fitted));
    });
}

mvfs_status mvfs_model_load(const char* path, mvfs_model** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        auto model = std::make_unique<mvfs_model>();
        model->fitted = mvfs::model_from_json(mvfs::read_text(path));
        *out = model.release();
    });
}

mvfs_status mvfs_model_hyperparams(const mvfs_model* model, mvfs_hyperparams* out) {
    return guarded([&] {
        require(model != nullptr && out != nullptr, "null argument");
        *out = to_c(model->fitted.hp);
    });
}

size_t mvfs_model_trace_length(const mvfs_model* model) { return model ? model->fitted.trace.size() : 0; }

mvfs_status mvfs_model_trace_entry(const mvfs_model* model, size_t index, mvfs_trace_entry* out) {
    return guarded([&] {
        require(model != nullptr && out != nullptr, "null argument");
        require(index < model->fitted.trace.size(), "trace index out of range");
        const auto& e = model->fitted.trace[index];
        *out = {e.iteration,         e.total,          e.terms.graph,       e.terms.orthogonality,
                e.terms.consistency, e.terms.b_sparsity, e.terms.pc_sparsity, e.terms.ps_sparsity,
                e.terms.entropy};
    });
}

mvfs_status mvfs_model_write_trace(const mvfs_model* model, const char* csv_path) {
    return guarded([&] {
        require(model != nullptr && csv_path != nullptr, "null argument");
        mvfs::write_text(csv_path, mvfs::trace_to_csv(model->fitted.trace));
    });
}

size_t mvfs_model_weight_count(const mvfs_model* model) {
    return model ? static_cast<size_t>(model->fitted.state.w.size()) : 0;
}

double mvfs_model_weight(const mvfs_model* model, size_t view) {
    if (!model || view >= static_cast<size_t>(model->fitted.state.w.size())) return 0.0;
    return model->fitted.state.w(static_cast<Eigen::Index>(view));
}

size_t mvfs_model_warning_count(const mvfs_model* model) { return model ? model->fitted.warnings.size() : 0; }

const char* mvfs_model_warning(const mvfs_model* model, size_t index) {
    if (!model || index >= model->fitted.warnings.size()) return nullptr;
    return model->fitted.warnings[index].c_str();
}

mvfs_status mvfs_embed_shape(const mvfs_model* model, const mvfs_dataset* dataset, size_t* rows, size_t* cols) {
    return guarded([&] {
        require(model != nullptr && dataset != nullptr && rows != nullptr && cols != nullptr, "null argument");
        if (model->fitted.state.pc.empty()) throw mvfs::InvalidState("model has not been fitted");
        *rows = dataset->data.instances();
        *cols = static_cast<size_t>(model->fitted.state.dim()) * (model->fitted.state.pc.size() + 1);
    });
}

mvfs_status mvfs_embed(const mvfs_model* model, const mvfs_dataset* dataset, double* out, size_t capacity) {
    return guarded([&] {
        require(model != nullptr && dataset != nullptr && out != nullptr, "null argument");
        const auto z = mvfs::embed(dataset->data, model->fitted);
        require(capacity >= static_cast<size_t>(z.data.size()), "output buffer too small");
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<RowMajor>(out, z.data.rows(), z.data.cols()) = z.data;
    });
}

mvfs_status mvfs_embed_write(const mvfs_model* model, const mvfs_dataset* dataset, const char* csv_path) {
    return guarded([&] {
        require(model != nullptr && dataset != nullptr && csv_path != nullptr, "null argument");
        mvfs::write_csv_matrix(csv_path, mvfs::embed(dataset->data, model->fitted).data);
    });
}

mvfs_status mvfs_export_rules(const mvfs_model* model, const char* text_path, const char* json_path) {
    return guarded([&] {
        require(model != nullptr, "null model");
        const auto rules = mvfs::export_rules(model->fitted);
        if (text_path) mvfs::write_text(text_path, mvfs::format_rules(rules));
        if (json_path) mvfs::write_text(json_path, mvfs::rules_to_json(rules));
    });
}

mvfs_status mvfs_evaluate(const mvfs_model* model, const mvfs_dataset* dataset, const mvfs_eval_options* options,
                          const char* report_path, mvfs_scores* out) {
    return guarded([&] {
        require(model != nullptr && dataset != nullptr && options != nullptr, "null argument");
        const auto opts = to_cpp(*options);
        mvfs::ClusteringReport report;
        if (options->refit) {
            report = mvfs::fit_and_evaluate(dataset->data, model->fitted.hp, opts, true);
        } else {
            report = mvfs::evaluate_embedding(mvfs::embed(dataset->data, model->fitted).data, dataset->data.labels,
                                              opts);
        }
        if (report_path) mvfs::write_text(report_path, mvfs::report_to_json(report));
        if (out) *out = {to_c(report.nmi), to_c(report.acc), to_c(report.purity)};
    });
}

mvfs_status mvfs_grid_search(const mvfs_dataset* dataset, const mvfs_hyperparams* base, const double* alphas,
                             size_t n_alphas, const double* betas, size_t n_betas, const double* gammas,
                             size_t n_gammas, const double* deltas, size_t n_deltas,
                             const mvfs_eval_options* options, int32_t threads, const char* csv_path,
                             const char* summary_path) {
    return guarded([&] {
        require(dataset != nullptr && base != nullptr && options != nullptr, "null argument");
        const auto grid = mvfs::cartesian_grid(list_or_default(alphas, n_alphas), list_or_default(betas, n_betas),
                                               list_or_default(gammas, n_gammas), list_or_default(deltas, n_deltas));
        mvfs::GridOptions go;
        go.eval = to_cpp(*options);
        go.refit = options->refit != 0;
        go.threads = threads;
        const auto result = mvfs::grid_search(dataset->data, to_cpp(*base), grid, go);
        if (csv_path) mvfs::write_text(csv_path, mvfs::grid_to_csv(result));
        if (summary_path) mvfs::write_text(summary_path, mvfs::grid_summary_json(result));
    });
}

mvfs_status mvfs_ablate(const mvfs_dataset* dataset, const mvfs_hyperparams* hp, const mvfs_eval_options* options,
                        const char* out_dir) {
    return guarded([&] {
        require(dataset != nullptr && hp != nullptr && options != nullptr && out_dir != nullptr, "null argument");
        const auto rows = mvfs::ablate(dataset->data, to_cpp(*hp), to_cpp(*options));
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        mvfs::write_text((dir / "ablation.csv").string(), mvfs::ablation_to_csv(rows));
        mvfs::write_text((dir / "ablation.txt").string(), mvfs::ablation_table(rows));
        for (const auto& row : rows) {
            mvfs::write_text((dir / ("trace_" + mvfs::to_string(row.variant) + ".csv")).string(),
                             mvfs::trace_to_csv(row.trace));
        }
    });
}

}  // extern "C"
