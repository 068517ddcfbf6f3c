#include "mvfs/serialize.hpp"

#include "mvfs/dataset.hpp"
#include "mvfs/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <sstream>

namespace mvfs {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from(const json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("ragged matrix in model file", i + 1, 0);
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json vector_json(const Eigen::Ref<const RowVector>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

RowVector row_from(const json& j) {
    RowVector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json hp_json(const Hyperparams& hp) {
    return {{"alpha", hp.alpha},       {"beta", hp.beta},
            {"gamma", hp.gamma},       {"delta", hp.delta},
            {"rules", hp.rules},       {"dim", hp.dim},
            {"iters", hp.max_iter},    {"knn", hp.neighbors},
            {"bandwidth", hp.bandwidth}, {"eps_irls", hp.eps_irls},
            {"tol_stop", hp.tol_stop}, {"seed", hp.seed},
            {"b_mode", to_string(hp.b_mode)}, {"variant", to_string(hp.variant)}};
}

Hyperparams hp_from(const json& j) {
    Hyperparams hp;
    hp.alpha = j.at("alpha").get<double>();
    hp.beta = j.at("beta").get<double>();
    hp.gamma = j.at("gamma").get<double>();
    hp.delta = j.at("delta").get<double>();
    hp.rules = j.at("rules").get<int>();
    hp.dim = j.at("dim").get<int>();
    hp.max_iter = j.at("iters").get<int>();
    hp.neighbors = j.at("knn").get<int>();
    hp.bandwidth = j.at("bandwidth").get<double>();
    hp.eps_irls = j.at("eps_irls").get<double>();
    hp.tol_stop = j.at("tol_stop").get<double>();
    hp.seed = j.at("seed").get<std::uint64_t>();
    hp.b_mode = parse_b_mode(j.at("b_mode").get<std::string>());
    hp.variant = parse_variant(j.at("variant").get<std::string>());
    return hp;
}

json terms_json(const ObjectiveTerms& t) {
    return {{"graph", t.graph},
            {"orthogonality", t.orthogonality},
            {"consistency", t.consistency},
            {"b_sparsity", t.b_sparsity},
            {"pc_sparsity", t.pc_sparsity},
            {"ps_sparsity", t.ps_sparsity},
            {"entropy", t.entropy}};
}

ObjectiveTerms terms_from(const json& j) {
    ObjectiveTerms t;
    t.graph = j.at("graph").get<double>();
    t.orthogonality = j.at("orthogonality").get<double>();
    t.consistency = j.at("consistency").get<double>();
    t.b_sparsity = j.at("b_sparsity").get<double>();
    t.pc_sparsity = j.at("pc_sparsity").get<double>();
    t.ps_sparsity = j.at("ps_sparsity").get<double>();
    t.entropy = j.at("entropy").get<double>();
    return t;
}

json summary_json(const MetricSummary& s) {
    return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}, {"runs", s.runs}};
}

std::string fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

}  // namespace

std::string hyperparams_to_json(const Hyperparams& hp) { return hp_json(hp).dump(2); }

std::string model_to_json(const FittedModel& model) {
    json j;
    j["format"] = "mvfs-model";
    j["version"] = kModelFormatVersion;
    j["hyperparams"] = hp_json(model.hp);
    json views = json::array();
    for (std::size_t v = 0; v < model.antecedents.size(); ++v) {
        const auto& a = model.antecedents[v];
        views.push_back({{"mean", vector_json(a.standardizer.mean)},
                         {"scale", vector_json(a.standardizer.scale)},
                         {"centers", matrix_json(a.bank.centers)},
                         {"widths", matrix_json(a.bank.widths)},
                         {"pc", matrix_json(model.state.pc.at(v))},
                         {"ps", matrix_json(model.state.ps.at(v))}});
    }
    j["views"] = std::move(views);
    j["weights"] = vector_json(model.state.w.transpose());
    j["b"] = matrix_json(model.state.b);
    json trace = json::array();
    for (const auto& e : model.trace) {
        trace.push_back({{"iteration", e.iteration}, {"total", e.total}, {"terms", terms_json(e.terms)},
                         {"weights", e.weights}});
    }
    j["trace"] = std::move(trace);
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    j["warnings"] = model.warnings;
    return j.dump(1) + "\n";
}

FittedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0, e.byte);
    }
    try {
        if (j.at("format").get<std::string>() != "mvfs-model") throw ParseError("not an mvfs model file", 0, 0);
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ParseError("unsupported model version " + std::to_string(version), 0, 0);
        }
        FittedModel m;
        m.hp = hp_from(j.at("hyperparams"));
        for (const auto& v : j.at("views")) {
            ViewAntecedent a;
            a.standardizer.mean = row_from(v.at("mean"));
            a.standardizer.scale = row_from(v.at("scale"));
            a.bank.centers = matrix_from(v.at("centers"));
            a.bank.widths = matrix_from(v.at("widths"));
            m.antecedents.push_back(std::move(a));
            m.state.pc.push_back(matrix_from(v.at("pc")));
            m.state.ps.push_back(matrix_from(v.at("ps")));
        }
        m.state.w = row_from(j.at("weights")).transpose();
        m.state.b = matrix_from(j.at("b"));
        for (const auto& e : j.at("trace")) {
            TraceEntry t;
            t.iteration = e.at("iteration").get<int>();
            t.total = e.at("total").get<double>();
            t.terms = terms_from(e.at("terms"));
            t.weights = e.at("weights").get<std::vector<double>>();
            m.trace.push_back(std::move(t));
        }
        m.iterations = j.at("iterations").get<int>();
        m.converged = j.at("converged").get<bool>();
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what(), 0, 0);
    }
}

std::string trace_to_csv(const FitTrace& trace) {
    std::ostringstream s;
    s << "iteration,total,graph,orthogonality,consistency,b_sparsity,pc_sparsity,ps_sparsity,entropy\n";
    for (const auto& e : trace) {
        const auto& t = e.terms;
        s << e.iteration << ',' << format_double(e.total) << ',' << format_double(t.graph) << ','
          << format_double(t.orthogonality) << ',' << format_double(t.consistency) << ','
          << format_double(t.b_sparsity) << ',' << format_double(t.pc_sparsity) << ','
          << format_double(t.ps_sparsity) << ',' << format_double(t.entropy) << '\n';
    }
    return s.str();
}

std::string report_to_json(const ClusteringReport& report) {
    json j = {{"clusters", report.clusters},
              {"repeats", report.repeats},
              {"nmi", summary_json(report.nmi)},
              {"acc", summary_json(report.acc)},
              {"purity", summary_json(report.purity)},
              {"best_assignment", report.best_assignment}};
    return j.dump(2) + "\n";
}

std::string grid_to_csv(const GridResult& result) {
    std::ostringstream s;
    s << "alpha,beta,gamma,delta,status,nmi_mean,nmi_std,acc_mean,acc_std,purity_mean,purity_std\n";
    for (const auto& row : result.rows) {
        const auto& p = row.point;
        s << format_double(p.alpha) << ',' << format_double(p.beta) << ',' << format_double(p.gamma) << ','
          << format_double(p.delta) << ',';
        if (!row.ok) {
            s << "failed,,,,,,\n";
            continue;
        }
        const auto& r = row.report;
        s << "ok," << format_double(r.nmi.mean) << ',' << format_double(r.nmi.stddev) << ','
          << format_double(r.acc.mean) << ',' << format_double(r.acc.stddev) << ','
          << format_double(r.purity.mean) << ',' << format_double(r.purity.stddev) << '\n';
    }
    return s.str();
}

std::string grid_summary_json(const GridResult& result) {
    auto best = [&](int idx, auto metric) -> json {
        if (idx < 0) return nullptr;
        const auto& row = result.rows[static_cast<std::size_t>(idx)];
        const MetricSummary& m = metric(row.report);
        return {{"row", idx},
                {"alpha", row.point.alpha},
                {"beta", row.point.beta},
                {"gamma", row.point.gamma},
                {"delta", row.point.delta},
                {"mean", m.mean},
                {"std", m.stddev}};
    };
    json failures = json::array();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (!result.rows[i].ok) failures.push_back({{"row", i}, {"error", result.rows[i].error}});
    }
    json j = {{"points", result.rows.size()},
              {"best_nmi", best(result.best_nmi, [](const ClusteringReport& r) -> const MetricSummary& { return r.nmi; })},
              {"best_acc", best(result.best_acc, [](const ClusteringReport& r) -> const MetricSummary& { return r.acc; })},
              {"best_purity",
               best(result.best_purity, [](const ClusteringReport& r) -> const MetricSummary& { return r.purity; })},
              {"failures", failures}};
    return j.dump(2) + "\n";
}

std::string rules_to_json(const RuleBaseExport& rules) {
    json views = json::array();
    for (const auto& vb : rules.views) {
        json rs = json::array();
        for (const auto& rule : vb.rules) {
            json clauses = json::array();
            for (const auto& c : rule.clauses) {
                clauses.push_back({{"label", c.label}, {"center", c.center}, {"width", c.width}});
            }
            rs.push_back({{"clauses", clauses},
                          {"common", matrix_json(rule.common)},
                          {"specific", matrix_json(rule.specific)}});
        }
        views.push_back({{"view", vb.view},
                         {"weight", vb.weight},
                         {"mean", vector_json(vb.standardizer.mean)},
                         {"scale", vector_json(vb.standardizer.scale)},
                         {"rules", rs}});
    }
    json j = {{"format", "mvfs-rules"}, {"version", kModelFormatVersion}, {"dim", rules.dim}, {"views", views}};
    return j.dump(1) + "\n";
}

RuleBaseExport rules_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RuleBaseExport out;
        out.dim = j.at("dim").get<int>();
        for (const auto& v : j.at("views")) {
            ViewRuleBase vb;
            vb.view = v.at("view").get<int>();
            vb.weight = v.at("weight").get<double>();
            vb.standardizer.mean = row_from(v.at("mean"));
            vb.standardizer.scale = row_from(v.at("scale"));
            for (const auto& r : v.at("rules")) {
                FuzzyRule rule;
                for (const auto& c : r.at("clauses")) {
                    rule.clauses.push_back(
                        {c.at("label").get<std::string>(), c.at("center").get<double>(), c.at("width").get<double>()});
                }
                rule.common = matrix_from(r.at("common"));
                rule.specific = matrix_from(r.at("specific"));
                vb.rules.push_back(std::move(rule));
            }
            out.views.push_back(std::move(vb));
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed rules file: ") + e.what(), 0, 0);
    }
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream s;
    s << "variant,nmi_mean,nmi_std,acc_mean,acc_std,purity_mean,purity_std,final_objective\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        s << to_string(row.variant) << ',' << format_double(r.nmi.mean) << ',' << format_double(r.nmi.stddev) << ','
          << format_double(r.acc.mean) << ',' << format_double(r.acc.stddev) << ',' << format_double(r.purity.mean)
          << ',' << format_double(r.purity.stddev) << ','
          << (row.trace.empty() ? std::string() : format_double(row.trace.back().total)) << '\n';
    }
    return s.str();
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
    std::ostringstream s;
    s << "Variant\tNMI\tACC\tPurity\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        s << to_string(row.variant) << '\t' << fixed4(r.nmi.mean) << "±" << fixed4(r.nmi.stddev) << '\t'
          << fixed4(r.acc.mean) << "±" << fixed4(r.acc.stddev) << '\t' << fixed4(r.purity.mean) << "±"
          << fixed4(r.purity.stddev) << '\n';
    }
    return s.str();
}

}  // namespace mvfs
