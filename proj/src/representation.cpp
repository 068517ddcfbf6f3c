#include "mvfs/representation.hpp"

#include "mvfs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace mvfs {

Embedding embed_fuzzy(const std::vector<Matrix>& fuzzy_views, const ModelState& state) {
    const auto views = fuzzy_views.size();
    if (views == 0 || state.pc.size() != views || state.ps.size() != views ||
        static_cast<std::size_t>(state.w.size()) != views) {
        throw InvalidState("model state does not match the number of views");
    }
    const Eigen::Index m = state.dim();
    const Eigen::Index n = fuzzy_views.front().rows();
    Embedding e;
    e.block_dim = static_cast<int>(m);
    e.data = Matrix::Zero(n, m * static_cast<Eigen::Index>(views + 1));
    e.blocks.push_back("common");
    for (std::size_t v = 0; v < views; ++v) {
        const Matrix& xg = fuzzy_views[v];
        if (xg.rows() != n || xg.cols() != state.pc[v].rows()) {
            throw InvalidArgument("fuzzy view " + std::to_string(v) + " does not match the fitted consequents");
        }
        const double w = state.w(static_cast<Eigen::Index>(v));
        e.data.leftCols(m) += w * (xg * state.pc[v]);
        e.data.middleCols(m * static_cast<Eigen::Index>(v + 1), m) = w * (xg * state.ps[v]);
        e.blocks.push_back("specific_" + std::to_string(v + 1));
    }
    return e;
}

Embedding embed(const MultiViewDataset& dataset, const FittedModel& model) {
    if (model.antecedents.empty() || model.state.pc.empty()) throw InvalidState("model has not been fitted");
    if (dataset.view_count() != model.antecedents.size()) {
        throw InvalidArgument("dataset has " + std::to_string(dataset.view_count()) + " views, model expects " +
                              std::to_string(model.antecedents.size()));
    }
    std::vector<Matrix> fuzzy;
    for (std::size_t v = 0; v < dataset.view_count(); ++v) {
        fuzzy.push_back(model.antecedents[v].transform(dataset.views[v].data));
    }
    return embed_fuzzy(fuzzy, model.state);
}

std::vector<std::string> linguistic_labels(const Vector& centers) {
    const auto k = static_cast<std::size_t>(centers.size());
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return centers(static_cast<Eigen::Index>(a)) < centers(static_cast<Eigen::Index>(b));
    });
    static const char* const kThree[] = {"Low", "Middle", "High"};
    std::vector<std::string> labels(k);
    for (std::size_t rank = 0; rank < k; ++rank) {
        labels[order[rank]] = k == 3 ? kThree[rank] : "Level " + std::to_string(rank + 1);
    }
    return labels;
}

RuleBaseExport export_rules(const FittedModel& model) {
    if (model.antecedents.empty() || model.state.pc.empty()) throw InvalidState("model has not been fitted");
    RuleBaseExport out;
    out.dim = model.state.dim();
    for (std::size_t v = 0; v < model.antecedents.size(); ++v) {
        const auto& bank = model.antecedents[v].bank;
        const Eigen::Index rules = bank.rule_count();
        const Eigen::Index d = bank.input_dim();
        ViewRuleBase vb;
        vb.view = static_cast<int>(v);
        vb.weight = model.state.w(static_cast<Eigen::Index>(v));
        vb.standardizer = model.antecedents[v].standardizer;
        vb.rules.resize(static_cast<std::size_t>(rules));
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto labels = linguistic_labels(bank.centers.col(j));
            for (Eigen::Index k = 0; k < rules; ++k) {
                vb.rules[static_cast<std::size_t>(k)].clauses.push_back(
                    {labels[static_cast<std::size_t>(k)], bank.centers(k, j), bank.widths(k, j)});
            }
        }
        for (Eigen::Index k = 0; k < rules; ++k) {
            auto& rule = vb.rules[static_cast<std::size_t>(k)];
            rule.common = model.state.pc[v].middleRows(k * (d + 1), d + 1);
            rule.specific = model.state.ps[v].middleRows(k * (d + 1), d + 1);
        }
        out.views.push_back(std::move(vb));
    }
    return out;
}

namespace {

std::string fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", std::abs(x));
    return buf;
}

std::string affine(const Matrix& table, Eigen::Index out) {
    std::ostringstream s;
    const double c0 = table(0, out);
    if (std::signbit(c0) && fixed4(c0) != "0.0000") s << '-';
    s << fixed4(c0);
    for (Eigen::Index j = 1; j < table.rows(); ++j) {
        const double c = table(j, out);
        s << ((std::signbit(c) && fixed4(c) != "0.0000") ? '-' : '+') << fixed4(c) << "x_" << j;
    }
    return s.str();
}

void write_block(std::ostringstream& s, const ViewRuleBase& vb, bool common) {
    s << "The rule base of the TSK fuzzy system for the " << (common ? "common" : "specific")
      << " representation (view " << vb.view + 1 << ", weight " << fixed4(vb.weight) << ")\n\n";
    for (std::size_t k = 0; k < vb.rules.size(); ++k) {
        const auto& rule = vb.rules[k];
        s << "Rule " << k + 1 << ":\n";
        for (std::size_t j = 0; j < rule.clauses.size(); ++j) {
            s << (j == 0 ? "IF: " : "") << "the " << j + 1 << "th feature is " << rule.clauses[j].label
              << (j + 1 == rule.clauses.size() ? ".\n" : " and\n");
        }
        const Matrix& table = common ? rule.common : rule.specific;
        for (Eigen::Index o = 0; o < table.cols(); ++o) {
            s << (o == 0 ? "Then: " : "") << "the " << o + 1 << "th output is " << affine(table, o)
              << (o + 1 == table.cols() ? "\n" : " and\n");
        }
        s << '\n';
    }
}

}  // namespace

std::string format_rules(const RuleBaseExport& rules) {
    std::ostringstream s;
    for (const auto& vb : rules.views) write_block(s, vb, true);
    for (const auto& vb : rules.views) write_block(s, vb, false);
    return s.str();
}

Matrix infer_rules(const RuleBaseExport& rules, const std::vector<Matrix>& raw_views) {
    if (raw_views.size() != rules.views.size()) throw InvalidArgument("view count does not match the rule base");
    const Eigen::Index m = rules.dim;
    const Eigen::Index n = raw_views.empty() ? 0 : raw_views.front().rows();
    Matrix out = Matrix::Zero(n, m * static_cast<Eigen::Index>(rules.views.size() + 1));
    for (std::size_t v = 0; v < rules.views.size(); ++v) {
        const auto& vb = rules.views[v];
        const Matrix x = vb.standardizer.apply(raw_views[v]);
        const auto k_rules = static_cast<Eigen::Index>(vb.rules.size());
        AntecedentBank bank;
        bank.centers.resize(k_rules, x.cols());
        bank.widths.resize(k_rules, x.cols());
        for (Eigen::Index k = 0; k < k_rules; ++k) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                bank.centers(k, j) = vb.rules[static_cast<std::size_t>(k)].clauses[static_cast<std::size_t>(j)].center;
                bank.widths(k, j) = vb.rules[static_cast<std::size_t>(k)].clauses[static_cast<std::size_t>(j)].width;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector mu = firing_levels(x.row(i), bank);
            RowVector common = RowVector::Zero(m), specific = RowVector::Zero(m);
            for (Eigen::Index k = 0; k < k_rules; ++k) {
                const auto& rule = vb.rules[static_cast<std::size_t>(k)];
                // f^k(x) = p_0 + sum_j p_j x_j for every output at once
                const RowVector fc = rule.common.row(0) + x.row(i) * rule.common.bottomRows(x.cols());
                const RowVector fs = rule.specific.row(0) + x.row(i) * rule.specific.bottomRows(x.cols());
                common += mu(k) * fc;
                specific += mu(k) * fs;
            }
            out.block(i, 0, 1, m) += vb.weight * common;
            out.block(i, m * static_cast<Eigen::Index>(v + 1), 1, m) = vb.weight * specific;
        }
    }
    return out;
}

}  // namespace mvfs
