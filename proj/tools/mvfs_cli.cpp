// mvfs: command-line front end over the C API.

#include "mvfs/mvfs.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CliError : std::runtime_error {
    mvfs_status status;
    CliError(mvfs_status s, const std::string& message) : std::runtime_error(message), status(s) {}
};

void check(mvfs_status status) {
    if (status != MVFS_OK) throw CliError(status, mvfs_last_error());
}

int exit_code_for(mvfs_status status) {
    switch (status) {
        case MVFS_OK: return kExitOk;
        case MVFS_ERR_INVALID_ARGUMENT:
        case MVFS_ERR_PARSE:
        case MVFS_ERR_LOAD:
        case MVFS_ERR_IO: return kExitConfig;
        case MVFS_ERR_NUMERIC: return kExitNumeric;
        default: return kExitFailure;
    }
}

struct DatasetDeleter {
    void operator()(mvfs_dataset* d) const { mvfs_dataset_free(d); }
};
struct ModelDeleter {
    void operator()(mvfs_model* m) const { mvfs_model_free(m); }
};
using DatasetPtr = std::unique_ptr<mvfs_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<mvfs_model, ModelDeleter>;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(MVFS_ERR_IO, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(MVFS_ERR_IO, "cannot write " + path.string());
    out << content;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw CliError(MVFS_ERR_INTERNAL, "SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

// Settings shared by every learning command. Unset optionals fall back to
// the config document and then to library defaults.
struct Settings {
    std::vector<std::string> views;
    std::optional<std::string> labels;
    std::optional<std::string> config;
    std::string out = ".";
    bool header = false;

    std::optional<std::uint64_t> seed;
    std::optional<int> iters;
    std::optional<int> rules;
    std::optional<int> dim;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<double> delta;
    std::optional<int> knn;
    std::optional<double> bandwidth;
    std::optional<double> eps_irls;
    std::optional<double> tol_stop;
    std::optional<std::string> b_mode;
    std::optional<std::string> variant;

    std::optional<int> repeats;
    std::optional<int> restarts;
    std::optional<int> clusters;
    bool refit = false;

    std::optional<std::string> model;
    std::vector<double> grid_alpha, grid_beta, grid_gamma, grid_delta;
    std::optional<int> threads;
};

struct Resolved {
    std::vector<std::string> views;
    std::optional<std::string> labels;
    bool header = false;
    mvfs_hyperparams hp{};
    mvfs_eval_options eval{};
    std::vector<double> grid_alpha, grid_beta, grid_gamma, grid_delta;
    int threads = 1;
};

const char* b_mode_name(int32_t mode) { return mode == MVFS_B_EXACT ? "exact" : "paper"; }

const char* variant_name(int32_t variant) {
    switch (variant) {
        case MVFS_VARIANT_COMMON_ONLY: return "common-only";
        case MVFS_VARIANT_NO_CONSISTENCY: return "no-consistency";
        default: return "full";
    }
}

int32_t parse_b_mode(const std::string& text) {
    if (text == "paper") return MVFS_B_PAPER;
    if (text == "exact") return MVFS_B_EXACT;
    throw CliError(MVFS_ERR_INVALID_ARGUMENT, "unknown b-mode '" + text + "' (expected paper|exact)");
}

int32_t parse_variant(const std::string& text) {
    if (text == "full") return MVFS_VARIANT_FULL;
    if (text == "common-only") return MVFS_VARIANT_COMMON_ONLY;
    if (text == "no-consistency") return MVFS_VARIANT_NO_CONSISTENCY;
    throw CliError(MVFS_ERR_INVALID_ARGUMENT,
                   "unknown variant '" + text + "' (expected full|common-only|no-consistency)");
}

template <class T>
void take(const json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

void apply_config(const json& doc, Resolved& r) {
    static const std::vector<std::string> known = {
        "views",    "labels",  "header",   "seed",    "iters",     "rules",   "dim",     "alpha",
        "beta",     "gamma",   "delta",    "knn",     "bandwidth", "eps_irls", "tol_stop", "b_mode",
        "variant",  "repeats", "restarts", "clusters", "refit",    "eval_seed", "grid",   "threads"};
    if (!doc.is_object()) throw CliError(MVFS_ERR_INVALID_ARGUMENT, "config must be a JSON object");
    for (const auto& item : doc.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw CliError(MVFS_ERR_INVALID_ARGUMENT, "unknown config field '" + item.key() + "'");
        }
    }
    try {
        take(doc, "views", r.views);
        if (doc.contains("labels")) r.labels = doc.at("labels").get<std::string>();
        take(doc, "header", r.header);
        take(doc, "seed", r.hp.seed);
        take(doc, "iters", r.hp.max_iter);
        take(doc, "rules", r.hp.rules);
        take(doc, "dim", r.hp.dim);
        take(doc, "alpha", r.hp.alpha);
        take(doc, "beta", r.hp.beta);
        take(doc, "gamma", r.hp.gamma);
        take(doc, "delta", r.hp.delta);
        take(doc, "knn", r.hp.knn);
        take(doc, "bandwidth", r.hp.bandwidth);
        take(doc, "eps_irls", r.hp.eps_irls);
        take(doc, "tol_stop", r.hp.tol_stop);
        if (doc.contains("b_mode")) r.hp.b_mode = parse_b_mode(doc.at("b_mode").get<std::string>());
        if (doc.contains("variant")) r.hp.variant = parse_variant(doc.at("variant").get<std::string>());
        take(doc, "repeats", r.eval.repeats);
        take(doc, "restarts", r.eval.restarts);
        take(doc, "clusters", r.eval.clusters);
        if (doc.contains("refit")) r.eval.refit = doc.at("refit").get<bool>() ? 1 : 0;
        r.eval.seed = r.hp.seed;
        take(doc, "eval_seed", r.eval.seed);
        take(doc, "threads", r.threads);
        if (doc.contains("grid")) {
            const auto& g = doc.at("grid");
            take(g, "alpha", r.grid_alpha);
            take(g, "beta", r.grid_beta);
            take(g, "gamma", r.grid_gamma);
            take(g, "delta", r.grid_delta);
        }
    } catch (const json::exception& e) {
        throw CliError(MVFS_ERR_PARSE, std::string("config: ") + e.what());
    }
}

Resolved resolve(const Settings& s) {
    Resolved r;
    mvfs_hyperparams_default(&r.hp);
    mvfs_eval_options_default(&r.eval);
    r.eval.seed = r.hp.seed;
    if (s.config) {
        json doc;
        try {
            doc = json::parse(read_file(*s.config));
        } catch (const json::parse_error& e) {
            throw CliError(MVFS_ERR_PARSE, "config " + *s.config + ": " + e.what());
        }
        apply_config(doc, r);
    }
    if (!s.views.empty()) r.views = s.views;
    if (s.labels) r.labels = s.labels;
    if (s.header) r.header = true;
    if (s.seed) {
        r.hp.seed = *s.seed;
        r.eval.seed = *s.seed;
    }
    if (s.iters) r.hp.max_iter = *s.iters;
    if (s.rules) r.hp.rules = *s.rules;
    if (s.dim) r.hp.dim = *s.dim;
    if (s.alpha) r.hp.alpha = *s.alpha;
    if (s.beta) r.hp.beta = *s.beta;
    if (s.gamma) r.hp.gamma = *s.gamma;
    if (s.delta) r.hp.delta = *s.delta;
    if (s.knn) r.hp.knn = *s.knn;
    if (s.bandwidth) r.hp.bandwidth = *s.bandwidth;
    if (s.eps_irls) r.hp.eps_irls = *s.eps_irls;
    if (s.tol_stop) r.hp.tol_stop = *s.tol_stop;
    if (s.b_mode) r.hp.b_mode = parse_b_mode(*s.b_mode);
    if (s.variant) r.hp.variant = parse_variant(*s.variant);
    if (s.repeats) r.eval.repeats = *s.repeats;
    if (s.restarts) r.eval.restarts = *s.restarts;
    if (s.clusters) r.eval.clusters = *s.clusters;
    if (s.refit) r.eval.refit = 1;
    if (!s.grid_alpha.empty()) r.grid_alpha = s.grid_alpha;
    if (!s.grid_beta.empty()) r.grid_beta = s.grid_beta;
    if (!s.grid_gamma.empty()) r.grid_gamma = s.grid_gamma;
    if (!s.grid_delta.empty()) r.grid_delta = s.grid_delta;
    if (s.threads) r.threads = *s.threads;
    return r;
}

json hyperparams_json(const mvfs_hyperparams& hp) {
    json j;
    j["alpha"] = hp.alpha;
    j["beta"] = hp.beta;
    j["gamma"] = hp.gamma;
    j["delta"] = hp.delta;
    j["rules"] = hp.rules;
    j["dim"] = hp.dim;
    j["iters"] = hp.max_iter;
    j["knn"] = hp.knn;
    j["bandwidth"] = hp.bandwidth;
    j["eps_irls"] = hp.eps_irls;
    j["tol_stop"] = hp.tol_stop;
    j["seed"] = hp.seed;
    j["b_mode"] = b_mode_name(hp.b_mode);
    j["variant"] = variant_name(hp.variant);
    return j;
}

json resolved_json(const Resolved& r, const mvfs_hyperparams& hp) {
    json j = hyperparams_json(hp);
    j["views"] = r.views;
    j["labels"] = r.labels ? json(*r.labels) : json(nullptr);
    j["header"] = r.header;
    j["repeats"] = r.eval.repeats;
    j["restarts"] = r.eval.restarts;
    j["clusters"] = r.eval.clusters;
    j["refit"] = r.eval.refit != 0;
    j["eval_seed"] = r.eval.seed;
    return j;
}

void write_manifest(const fs::path& dir, const std::string& command, json config, std::uint64_t seed,
                    const std::vector<fs::path>& artifacts) {
    json m;
    m["tool"] = "mvfs";
    m["version"] = mvfs_version();
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = std::move(config);
    json hashes = json::object();
    for (const auto& path : artifacts) {
        hashes[path.filename().string()] = {{"sha256", sha256_hex(read_file(path))}};
    }
    m["artifacts"] = std::move(hashes);
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

DatasetPtr load(const Resolved& r, bool need_labels) {
    if (r.views.empty()) throw CliError(MVFS_ERR_INVALID_ARGUMENT, "no view files given (--views)");
    if (need_labels && !r.labels) throw CliError(MVFS_ERR_INVALID_ARGUMENT, "this command needs --labels");
    std::vector<const char*> paths;
    for (const auto& v : r.views) paths.push_back(v.c_str());
    mvfs_dataset* raw = nullptr;
    check(mvfs_dataset_load(paths.data(), paths.size(), r.labels ? r.labels->c_str() : nullptr, r.header ? 1 : 0,
                            &raw));
    DatasetPtr ds(raw);
    std::cerr << "loaded N=" << mvfs_dataset_instances(raw) << " V=" << mvfs_dataset_views(raw) << " d=[";
    for (size_t v = 0; v < mvfs_dataset_views(raw); ++v) {
        std::cerr << (v ? "," : "") << mvfs_dataset_view_dim(raw, v);
    }
    std::cerr << "]";
    if (r.labels) std::cerr << " classes=" << mvfs_dataset_classes(raw);
    std::cerr << "\n";
    return ds;
}

ModelPtr fit_model(const mvfs_dataset* ds, const mvfs_hyperparams& hp) {
    mvfs_model* raw = nullptr;
    check(mvfs_fit(ds, &hp, &raw));
    ModelPtr model(raw);
    for (size_t i = 0; i < mvfs_model_warning_count(raw); ++i) {
        std::cerr << "warning: " << mvfs_model_warning(raw, i) << "\n";
    }
    return model;
}

ModelPtr load_model(const std::string& path) {
    mvfs_model* raw = nullptr;
    check(mvfs_model_load(path.c_str(), &raw));
    return ModelPtr(raw);
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError(MVFS_ERR_IO, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

void print_scores(const mvfs_scores& s) {
    char line[256];
    std::snprintf(line, sizeof line, "NMI %.4f±%.4f  ACC %.4f±%.4f  Purity %.4f±%.4f\n", s.nmi.mean, s.nmi.std,
                  s.acc.mean, s.acc.std, s.purity.mean, s.purity.std);
    std::cout << line;
}

int run_fit(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    auto ds = load(r, false);
    auto model = fit_model(ds.get(), r.hp);
    const auto model_path = dir / "model.json";
    const auto trace_path = dir / "trace.csv";
    check(mvfs_model_save(model.get(), model_path.string().c_str()));
    check(mvfs_model_write_trace(model.get(), trace_path.string().c_str()));
    mvfs_hyperparams used{};
    check(mvfs_model_hyperparams(model.get(), &used));
    write_manifest(dir, "fit", resolved_json(r, used), used.seed, {model_path, trace_path});
    mvfs_trace_entry last{};
    check(mvfs_model_trace_entry(model.get(), mvfs_model_trace_length(model.get()) - 1, &last));
    std::cout << "iterations " << last.iteration << "  objective " << last.total << "\n";
    return kExitOk;
}

int run_evaluate(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    auto ds = load(r, true);
    ModelPtr model = s.model ? load_model(*s.model) : fit_model(ds.get(), r.hp);
    mvfs_hyperparams used{};
    check(mvfs_model_hyperparams(model.get(), &used));
    const auto report_path = dir / "report.json";
    mvfs_scores scores{};
    check(mvfs_evaluate(model.get(), ds.get(), &r.eval, report_path.string().c_str(), &scores));
    auto config = resolved_json(r, used);
    if (s.model) config["model"] = *s.model;
    write_manifest(dir, "evaluate", config, used.seed, {report_path});
    print_scores(scores);
    return kExitOk;
}

int run_export_rules(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    ModelPtr model;
    if (s.model) {
        model = load_model(*s.model);
    } else {
        auto ds = load(r, false);
        model = fit_model(ds.get(), r.hp);
    }
    mvfs_hyperparams used{};
    check(mvfs_model_hyperparams(model.get(), &used));
    const auto text_path = dir / "rules.txt";
    const auto json_path = dir / "rules.json";
    check(mvfs_export_rules(model.get(), text_path.string().c_str(), json_path.string().c_str()));
    auto config = resolved_json(r, used);
    if (s.model) config["model"] = *s.model;
    write_manifest(dir, "export-rules", config, used.seed, {text_path, json_path});
    std::cout << read_file(text_path);
    return kExitOk;
}

int run_embed(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    auto ds = load(r, false);
    ModelPtr model = s.model ? load_model(*s.model) : fit_model(ds.get(), r.hp);
    mvfs_hyperparams used{};
    check(mvfs_model_hyperparams(model.get(), &used));
    const auto path = dir / "embedding.csv";
    check(mvfs_embed_write(model.get(), ds.get(), path.string().c_str()));
    auto config = resolved_json(r, used);
    if (s.model) config["model"] = *s.model;
    write_manifest(dir, "embed", config, used.seed, {path});
    size_t rows = 0, cols = 0;
    check(mvfs_embed_shape(model.get(), ds.get(), &rows, &cols));
    std::cout << "embedding " << rows << " x " << cols << "\n";
    return kExitOk;
}

int run_grid(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    auto ds = load(r, true);
    const auto csv_path = dir / "grid.csv";
    const auto summary_path = dir / "grid_summary.json";
    auto list = [](const std::vector<double>& v) { return v.empty() ? nullptr : v.data(); };
    check(mvfs_grid_search(ds.get(), &r.hp, list(r.grid_alpha), r.grid_alpha.size(), list(r.grid_beta),
                           r.grid_beta.size(), list(r.grid_gamma), r.grid_gamma.size(), list(r.grid_delta),
                           r.grid_delta.size(), &r.eval, r.threads, csv_path.string().c_str(),
                           summary_path.string().c_str()));
    auto config = resolved_json(r, r.hp);
    config["grid"] = {{"alpha", r.grid_alpha}, {"beta", r.grid_beta}, {"gamma", r.grid_gamma},
                      {"delta", r.grid_delta}};
    config["threads"] = r.threads;
    write_manifest(dir, "grid", config, r.hp.seed, {csv_path, summary_path});
    std::cout << read_file(summary_path);
    return kExitOk;
}

int run_ablate(const Settings& s) {
    const auto r = resolve(s);
    const auto dir = prepare_out(s.out);
    auto ds = load(r, true);
    check(mvfs_ablate(ds.get(), &r.hp, &r.eval, dir.string().c_str()));
    std::vector<fs::path> artifacts = {dir / "ablation.csv", dir / "ablation.txt"};
    for (const char* v : {"full", "common-only", "no-consistency"}) {
        artifacts.push_back(dir / (std::string("trace_") + v + ".csv"));
    }
    write_manifest(dir, "ablate", resolved_json(r, r.hp), r.hp.seed, artifacts);
    std::cout << read_file(dir / "ablation.txt");
    return kExitOk;
}

struct SynthSettings {
    std::string out = ".";
    int instances = 0;
    int views = 0;
    int clusters = 0;
    double noise = 0.0;
    double separation = 0.0;
    std::uint64_t seed = 0;
    std::vector<int32_t> dims;
};

int run_synth(const SynthSettings& s) {
    mvfs_synth_params p{};
    mvfs_synth_params_default(&p);
    p.instances = s.instances;
    p.views = s.views;
    p.clusters = s.clusters;
    p.noise = s.noise;
    p.separation = s.separation;
    p.seed = s.seed;
    if (!s.dims.empty()) {
        if (static_cast<int>(s.dims.size()) != s.views) {
            throw CliError(MVFS_ERR_INVALID_ARGUMENT, "--dims needs one value per view");
        }
        p.dims = s.dims.data();
    }
    const auto dir = prepare_out(s.out);
    mvfs_dataset* raw = nullptr;
    check(mvfs_synth(&p, &raw));
    DatasetPtr ds(raw);
    check(mvfs_dataset_write(raw, dir.string().c_str()));
    std::vector<fs::path> artifacts;
    json dims = json::array();
    for (int v = 0; v < s.views; ++v) {
        artifacts.push_back(dir / ("view" + std::to_string(v + 1) + ".csv"));
        dims.push_back(mvfs_dataset_view_dim(raw, static_cast<size_t>(v)));
    }
    artifacts.push_back(dir / "labels.csv");
    json config = {{"instances", s.instances}, {"views", s.views},           {"clusters", s.clusters},
                   {"noise", s.noise},         {"separation", s.separation}, {"seed", s.seed},
                   {"dims", dims}};
    write_manifest(dir, "synth", config, s.seed, artifacts);
    std::cout << "wrote " << artifacts.size() << " files to " << dir.string() << "\n";
    return kExitOk;
}

void add_learning_options(CLI::App* cmd, Settings& s, bool needs_views) {
    auto* views = cmd->add_option("--views", s.views, "Per-view numeric CSV files");
    if (needs_views) views->expected(1, -1);
    cmd->add_option("--labels", s.labels, "Single-column CSV of class identifiers");
    cmd->add_option("--config", s.config, "JSON config; flags override its fields");
    cmd->add_option("--out", s.out, "Output directory")->capture_default_str();
    cmd->add_flag("--header", s.header, "Skip one header row in every CSV");
    cmd->add_option("--seed", s.seed, "Random seed");
    cmd->add_option("--iters", s.iters, "Maximum iterations")->check(CLI::NonNegativeNumber);
    cmd->add_option("--rules", s.rules, "Fuzzy rules per view")->check(CLI::PositiveNumber);
    cmd->add_option("--dim", s.dim, "Representation dimension per block (0: class count)");
    cmd->add_option("--alpha", s.alpha, "Orthogonality weight");
    cmd->add_option("--beta", s.beta, "Consistency weight");
    cmd->add_option("--gamma", s.gamma, "Row-sparsity weight");
    cmd->add_option("--delta", s.delta, "View-weight entropy temperature");
    cmd->add_option("--knn", s.knn, "Neighbours in the similarity graph")->check(CLI::PositiveNumber);
    cmd->add_option("--bandwidth", s.bandwidth, "Gaussian kernel width (<= 0: automatic)");
    cmd->add_option("--eps-irls", s.eps_irls, "Row-norm floor of the reweighting");
    cmd->add_option("--tol-stop", s.tol_stop, "Relative change for early stopping");
    cmd->add_option("--b-mode", s.b_mode, "Mapping update: paper|exact");
    cmd->add_option("--variant", s.variant, "full|common-only|no-consistency");
    cmd->add_option("--repeats", s.repeats, "K-means repeats")->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", s.restarts, "K-means restarts per repeat")->check(CLI::PositiveNumber);
    cmd->add_option("--clusters", s.clusters, "K-means clusters (0: class count)");
    cmd->add_flag("--refit", s.refit, "Refit the model for every repeat");
}

void write_error(const std::string& out, const std::string& command, mvfs_status status,
                 const std::string& message, int code) {
    json e;
    e["error"] = mvfs_status_name(status);
    e["message"] = message;
    e["command"] = command;
    e["exit_code"] = code;
    const std::string text = e.dump(2);
    std::cerr << text << "\n";
    std::error_code ec;
    if (!out.empty() && fs::is_directory(out, ec)) {
        std::ofstream f(fs::path(out) / "error.json", std::ios::binary);
        if (f) f << text << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-view fuzzy representation learning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mvfs_version()));

    Settings s;
    SynthSettings synth;
    {
        mvfs_synth_params p{};
        mvfs_synth_params_default(&p);
        synth.instances = p.instances;
        synth.views = p.views;
        synth.clusters = p.clusters;
        synth.noise = p.noise;
        synth.separation = p.separation;
        synth.seed = p.seed;
    }

    auto* fit = app.add_subcommand("fit", "Fit a model; writes model.json and trace.csv");
    add_learning_options(fit, s, false);

    auto* evaluate = app.add_subcommand("evaluate", "Cluster the representation; writes report.json");
    add_learning_options(evaluate, s, false);
    evaluate->add_option("--model", s.model, "Fitted model (fits from the views when omitted)");

    auto* rules = app.add_subcommand("export-rules", "Write rules.txt and rules.json");
    add_learning_options(rules, s, false);
    rules->add_option("--model", s.model, "Fitted model (fits from the views when omitted)");

    auto* embed = app.add_subcommand("embed", "Write the learned representation as embedding.csv");
    add_learning_options(embed, s, false);
    embed->add_option("--model", s.model, "Fitted model (fits from the views when omitted)");

    auto* grid = app.add_subcommand("grid", "Sweep alpha, beta, gamma, delta; writes grid.csv");
    add_learning_options(grid, s, false);
    grid->add_option("--grid-alpha", s.grid_alpha, "Alpha values (default 2^-5..2^5)");
    grid->add_option("--grid-beta", s.grid_beta, "Beta values (default 2^-5..2^5)");
    grid->add_option("--grid-gamma", s.grid_gamma, "Gamma values (default 2^-5..2^5)");
    grid->add_option("--grid-delta", s.grid_delta, "Delta values (default 2^-5..2^5)");
    grid->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* ablate = app.add_subcommand("ablate", "Compare full, common-only and no-consistency variants");
    add_learning_options(ablate, s, false);

    auto* gen = app.add_subcommand("synth", "Generate a synthetic multi-view dataset");
    gen->add_option("--out", synth.out, "Output directory")->capture_default_str();
    gen->add_option("--n", synth.instances, "Instances")->capture_default_str();
    gen->add_option("--num-views", synth.views, "Views")->capture_default_str();
    gen->add_option("--clusters", synth.clusters, "Clusters")->capture_default_str();
    gen->add_option("--noise", synth.noise, "Noise standard deviation")->capture_default_str();
    gen->add_option("--separation", synth.separation, "Distance of cluster centers from the origin")
        ->capture_default_str();
    gen->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    gen->add_option("--dims", synth.dims, "Feature count per view");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    const std::string out = chosen == gen ? synth.out : s.out;
    try {
        if (chosen == fit) return run_fit(s);
        if (chosen == evaluate) return run_evaluate(s);
        if (chosen == rules) return run_export_rules(s);
        if (chosen == embed) return run_embed(s);
        if (chosen == grid) return run_grid(s);
        if (chosen == ablate) return run_ablate(s);
        return run_synth(synth);
    } catch (const CliError& e) {
        const int code = exit_code_for(e.status);
        write_error(out, name, e.status, e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(out, name, MVFS_ERR_INTERNAL, e.what(), kExitFailure);
        return kExitFailure;
    }
}
