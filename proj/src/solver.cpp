#include "mvfs/solver.hpp"

#include "mvfs/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mvfs {

std::string to_string(BUpdateMode mode) {
    return mode == BUpdateMode::ExactSolve ? "exact" : "paper";
}

std::string to_string(Variant variant) {
    switch (variant) {
        case Variant::CommonOnly: return "common-only";
        case Variant::NoConsistency: return "no-consistency";
        case Variant::Full: break;
    }
    return "full";
}

BUpdateMode parse_b_mode(const std::string& text) {
    if (text == "paper") return BUpdateMode::PaperFaithful;
    if (text == "exact") return BUpdateMode::ExactSolve;
    throw InvalidArgument("unknown b-mode '" + text + "' (expected paper|exact)");
}

Variant parse_variant(const std::string& text) {
    if (text == "full") return Variant::Full;
    if (text == "common-only") return Variant::CommonOnly;
    if (text == "no-consistency") return Variant::NoConsistency;
    throw InvalidArgument("unknown variant '" + text + "' (expected full|common-only|no-consistency)");
}

void Hyperparams::validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!finite_nonneg(alpha) || !finite_nonneg(beta) || !finite_nonneg(gamma)) {
        throw InvalidArgument("alpha, beta and gamma must be finite and non-negative");
    }
    if (!(std::isfinite(delta) && delta > 0.0)) throw InvalidArgument("delta must be positive");
    if (rules < 1) throw InvalidArgument("rule count must be at least 1");
    if (dim < 1) throw InvalidArgument("embedding dimension must be at least 1");
    if (max_iter < 0) throw InvalidArgument("iteration count must be non-negative");
    if (!(eps_irls > 0.0)) throw InvalidArgument("eps_irls must be positive");
    if (!(tol_stop >= 0.0)) throw InvalidArgument("tol_stop must be non-negative");
}

ViewProblem ViewProblem::make(Matrix xg, const GraphLaplacian& graph) {
    if (graph.laplacian.rows() != xg.rows()) throw InvalidArgument("graph and fuzzy matrix disagree on N");
    ViewProblem vp;
    vp.xt_l_x = xg.transpose() * graph.laplacian * xg;
    vp.xt_l_x = 0.5 * (vp.xt_l_x + vp.xt_l_x.transpose()).eval();
    vp.xt_x = xg.transpose() * xg;
    vp.lap = graph.laplacian;
    vp.xg = std::move(xg);
    return vp;
}

namespace {

bool uses_specific(const Hyperparams& hp) { return hp.variant != Variant::CommonOnly; }
bool uses_consistency(const Hyperparams& hp) { return hp.variant != Variant::NoConsistency; }

void check_shapes(const ModelState& state, const Problem& problem) {
    const auto v = problem.view_count();
    if (state.pc.size() != v || state.ps.size() != v || static_cast<std::size_t>(state.w.size()) != v) {
        throw InvalidArgument("model state and problem disagree on view count");
    }
    const auto m = state.dim();
    for (std::size_t i = 0; i < v; ++i) {
        const auto dg = problem.views[i].xg.cols();
        if (state.pc[i].rows() != dg || state.ps[i].rows() != dg || state.pc[i].cols() != m ||
            state.ps[i].cols() != m) {
            throw InvalidArgument("consequent shape mismatch in view " + std::to_string(i));
        }
    }
    if (state.b.size() != 0 && (state.b.rows() != m || state.b.cols() != problem.instances())) {
        throw InvalidArgument("mapping B must be m x N");
    }
}

double quad_form_trace(const Matrix& a, const Matrix& p) { return (p.transpose() * a * p).trace(); }

double entropy_term(const Vector& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > 0.0) s += w(i) * std::log(w(i));
    }
    return s;
}

// Symmetric solve with one ridge retry. Throws NumericFailure when the
// factorisation still fails or produces non-finite output.
Matrix solve_symmetric(const Matrix& a, const Matrix& rhs, int view, const char* what) {
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-14) {
        Matrix x = ldlt.solve(rhs);
        if (x.allFinite()) return x;
    }
    Matrix ridged = a;
    ridged.diagonal().array() += kRidge;
    ldlt.compute(ridged);
    if (ldlt.info() == Eigen::Success) {
        Matrix x = ldlt.solve(rhs);
        if (x.allFinite()) return x;
    }
    throw NumericFailure(std::string(what) + ": linear system is singular", view);
}

}  // namespace

double l21_norm(const Matrix& m) { return m.rowwise().norm().sum(); }

Vector irls_diag(const Matrix& m, double eps) {
    Vector f(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) f(i) = 1.0 / std::max(m.row(i).norm(), eps);
    return f;
}

double graph_smoothness(const ModelState& state, std::size_t view, const Problem& problem) {
    const Matrix p = state.pc[view] + state.ps[view];
    return quad_form_trace(problem.views[view].xt_l_x, p);
}

ObjectiveTerms objective(const ModelState& state, const Problem& problem, const Hyperparams& hp) {
    check_shapes(state, problem);
    ObjectiveTerms t;
    const auto m = state.dim();
    const Matrix eye = Matrix::Identity(m, m);
    for (std::size_t v = 0; v < problem.view_count(); ++v) {
        const auto& vp = problem.views[v];
        t.graph += state.w(static_cast<Eigen::Index>(v)) * graph_smoothness(state, v, problem);
        t.pc_sparsity += hp.gamma * l21_norm(state.pc[v]);
        if (uses_specific(hp)) {
            t.orthogonality += hp.alpha * (state.pc[v].transpose() * vp.xt_x * state.ps[v]).squaredNorm();
            t.ps_sparsity += hp.gamma * l21_norm(state.ps[v]);
        }
        if (uses_consistency(hp)) {
            t.consistency += hp.beta * (state.b * (vp.xg * state.pc[v]) - eye).squaredNorm();
        }
    }
    if (uses_consistency(hp)) t.b_sparsity = hp.gamma * l21_norm(state.b);
    t.entropy = hp.delta * entropy_term(state.w);
    return t;
}

double common_surrogate(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                        const Vector& fc) {
    const auto& vp = problem.views[view];
    const Matrix& pc = state.pc[view];
    const Matrix& ps = state.ps[view];
    const double w = state.w(static_cast<Eigen::Index>(view));
    double f = w * quad_form_trace(vp.xt_l_x, pc + ps);
    f += hp.alpha * (pc.transpose() * vp.xt_x * ps).squaredNorm();
    if (uses_consistency(hp)) {
        const auto m = state.dim();
        f += hp.beta * (state.b * (vp.xg * pc) - Matrix::Identity(m, m)).squaredNorm();
    }
    f += hp.gamma * (pc.transpose() * fc.asDiagonal() * pc).trace();
    return f;
}

double specific_surrogate(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                          const Vector& fs) {
    const auto& vp = problem.views[view];
    const Matrix& pc = state.pc[view];
    const Matrix& ps = state.ps[view];
    const double w = state.w(static_cast<Eigen::Index>(view));
    double f = w * quad_form_trace(vp.xt_l_x, pc + ps);
    f += hp.alpha * (pc.transpose() * vp.xt_x * ps).squaredNorm();
    f += hp.gamma * (ps.transpose() * fs.asDiagonal() * ps).trace();
    return f;
}

double mapping_surrogate(const ModelState& state, const Problem& problem, const Hyperparams& hp, const Vector& fb) {
    const auto m = state.dim();
    const Matrix eye = Matrix::Identity(m, m);
    double f = 0.0;
    for (std::size_t v = 0; v < problem.view_count(); ++v) {
        f += (state.b * (problem.views[v].xg * state.pc[v]) - eye).squaredNorm();
    }
    return f + hp.gamma * (state.b.transpose() * fb.asDiagonal() * state.b).trace();
}

double weights_objective(const ModelState& state, const Problem& problem, const Hyperparams& hp) {
    double f = 0.0;
    for (std::size_t v = 0; v < problem.view_count(); ++v) {
        f += state.w(static_cast<Eigen::Index>(v)) * graph_smoothness(state, v, problem);
    }
    return f + hp.delta * entropy_term(state.w);
}

Matrix update_common(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                     const Vector& fc) {
    const auto& vp = problem.views[view];
    const Matrix& ps = state.ps[view];
    const double w = state.w(static_cast<Eigen::Index>(view));

    const Matrix gps = vp.xt_x * ps;  // Xg^T Xg Ps
    Matrix lhs = w * vp.xt_l_x + hp.alpha * gps * gps.transpose();
    Matrix rhs = -w * vp.xt_l_x * ps;
    if (uses_consistency(hp)) {
        const Matrix bx = state.b * vp.xg;  // m x d_g
        lhs += hp.beta * bx.transpose() * bx;
        rhs += hp.beta * bx.transpose();
    }
    lhs.diagonal() += hp.gamma * fc;
    return solve_symmetric(lhs, rhs, static_cast<int>(view), "common consequent update");
}

Matrix update_common(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp) {
    return update_common(state, view, problem, hp, irls_diag(state.pc[view], hp.eps_irls));
}

Matrix update_specific(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp,
                       const Vector& fs) {
    const auto& vp = problem.views[view];
    const Matrix& pc = state.pc[view];
    const double w = state.w(static_cast<Eigen::Index>(view));

    const Matrix gpc = vp.xt_x * pc;
    Matrix lhs = w * vp.xt_l_x + hp.alpha * gpc * gpc.transpose();
    lhs.diagonal() += hp.gamma * fs;
    const Matrix rhs = -w * vp.xt_l_x * pc;
    return solve_symmetric(lhs, rhs, static_cast<int>(view), "specific consequent update");
}

Matrix update_specific(const ModelState& state, std::size_t view, const Problem& problem, const Hyperparams& hp) {
    return update_specific(state, view, problem, hp, irls_diag(state.ps[view], hp.eps_irls));
}

Matrix update_mapping(const ModelState& state, const Problem& problem, const Hyperparams& hp, const Vector& fb) {
    const auto m = state.dim();
    const auto n = problem.instances();
    const auto views = static_cast<Eigen::Index>(problem.view_count());
    if (fb.size() != m) throw InvalidArgument("F_b must have m entries");

    if (hp.b_mode == BUpdateMode::PaperFaithful) {
        Matrix zsum = Matrix::Zero(m, n);
        for (std::size_t v = 0; v < problem.view_count(); ++v) {
            zsum += (problem.views[v].xg * state.pc[v]).transpose();
        }
        const Vector scale = (1.0 + hp.gamma * fb.array()).inverse();
        return scale.asDiagonal() * zsum;
    }

    // Row i of B solves b_i (W W^T + gamma f_i I) = c_i with W = [Z_c^1 .. Z_c^V]
    // and c_i = W s_i, where s_i picks column i of every block. Through the
    // push-through identity b_i = (W (W^T W + gamma f_i I)^-1 s_i)^T, which
    // is a (Vm x Vm) solve instead of an N x N one.
    Matrix wide(n, views * m);
    for (Eigen::Index v = 0; v < views; ++v) {
        wide.middleCols(v * m, m) = problem.views[static_cast<std::size_t>(v)].xg * state.pc[static_cast<std::size_t>(v)];
    }
    const Matrix gram = wide.transpose() * wide;
    Matrix b(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        Matrix lhs = gram;
        lhs.diagonal().array() += hp.gamma * fb(i);
        Matrix selector = Matrix::Zero(views * m, 1);
        for (Eigen::Index v = 0; v < views; ++v) selector(v * m + i, 0) = 1.0;
        const Matrix y = solve_symmetric(lhs, selector, -1, "mapping update");
        b.row(i) = (wide * y).transpose();
    }
    return b;
}

Matrix update_mapping(const ModelState& state, const Problem& problem, const Hyperparams& hp) {
    return update_mapping(state, problem, hp, irls_diag(state.b, hp.eps_irls));
}

Vector update_weights(const ModelState& state, const Problem& problem, const Hyperparams& hp) {
    const auto views = static_cast<Eigen::Index>(problem.view_count());
    Vector logits(views);
    for (Eigen::Index v = 0; v < views; ++v) {
        logits(v) = -graph_smoothness(state, static_cast<std::size_t>(v), problem) / hp.delta;
    }
    Vector w = (logits.array() - logits.maxCoeff()).exp();
    return w / w.sum();
}

Problem prepare(const MultiViewDataset& dataset, Hyperparams& hp, std::vector<ViewAntecedent>& antecedents,
                std::vector<std::string>* warnings) {
    validate(dataset);
    if (hp.dim <= 0) {
        if (!dataset.has_labels()) throw InvalidArgument("embedding dimension is required when no labels are given");
        hp.dim = static_cast<int>(dataset.class_count());
    }
    hp.validate();
    antecedents.clear();
    Problem problem;
    const KnnOptions knn{hp.neighbors, hp.bandwidth};
    for (const auto& view : dataset.views) {
        antecedents.push_back(ViewAntecedent::estimate(view.data, hp.rules, warnings));
        Matrix xg = antecedents.back().transform(view.data);
        const GraphLaplacian graph = laplacian(knn_similarity(xg, knn));
        problem.views.push_back(ViewProblem::make(std::move(xg), graph));
    }
    return problem;
}

ModelState initialize(const Problem& problem, const Hyperparams& hp) {
    ModelState state;
    std::mt19937_64 rng(hp.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto m = hp.dim;
    for (const auto& vp : problem.views) {
        const auto dg = vp.xg.cols();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dg));
        Matrix pc(dg, m), ps(dg, m);
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < dg; ++i) pc(i, j) = scale * gauss(rng);
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < dg; ++i) ps(i, j) = scale * gauss(rng);
        if (!uses_specific(hp)) ps.setZero();
        state.pc.push_back(std::move(pc));
        state.ps.push_back(std::move(ps));
    }
    const auto views = static_cast<Eigen::Index>(problem.view_count());
    state.w = Vector::Constant(views, 1.0 / static_cast<double>(views));
    state.b = Matrix::Zero(m, problem.instances());
    if (uses_consistency(hp)) state.b = update_mapping(state, problem, hp, Vector::Ones(m));
    return state;
}

namespace {

TraceEntry record(int iteration, const ModelState& state, const Problem& problem, const Hyperparams& hp,
                  std::chrono::steady_clock::time_point start) {
    TraceEntry e;
    e.iteration = iteration;
    e.terms = objective(state, problem, hp);
    e.total = e.terms.total();
    e.weights.assign(state.w.data(), state.w.data() + state.w.size());
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

}  // namespace

void optimize(ModelState& state, const Problem& problem, const Hyperparams& hp, FitTrace& trace,
              std::vector<SubstepCheck>* substeps, int* iterations, bool* converged) {
    check_shapes(state, problem);
    const auto start = std::chrono::steady_clock::now();
    trace.clear();
    trace.push_back(record(0, state, problem, hp, start));

    constexpr int kPatience = 5;
    int quiet = 0;
    int t = 1;
    bool stopped = false;
    for (; t <= hp.max_iter; ++t) {
        try {
            if (uses_consistency(hp)) {
                const Vector fb = irls_diag(state.b, hp.eps_irls);
                SubstepCheck chk{t, -1, Substep::Mapping, hp.b_mode == BUpdateMode::ExactSolve};
                if (substeps) chk.before = mapping_surrogate(state, problem, hp, fb);
                state.b = update_mapping(state, problem, hp, fb);
                if (substeps) {
                    chk.after = mapping_surrogate(state, problem, hp, fb);
                    substeps->push_back(chk);
                }
            }
            for (std::size_t v = 0; v < problem.view_count(); ++v) {
                const int vi = static_cast<int>(v);
                const Vector fc = irls_diag(state.pc[v], hp.eps_irls);
                SubstepCheck chk{t, vi, Substep::Common, true};
                if (substeps) chk.before = common_surrogate(state, v, problem, hp, fc);
                state.pc[v] = update_common(state, v, problem, hp, fc);
                if (substeps) {
                    chk.after = common_surrogate(state, v, problem, hp, fc);
                    substeps->push_back(chk);
                }

                if (uses_specific(hp)) {
                    const Vector fs = irls_diag(state.ps[v], hp.eps_irls);
                    SubstepCheck sc{t, vi, Substep::Specific, true};
                    if (substeps) sc.before = specific_surrogate(state, v, problem, hp, fs);
                    state.ps[v] = update_specific(state, v, problem, hp, fs);
                    if (substeps) {
                        sc.after = specific_surrogate(state, v, problem, hp, fs);
                        substeps->push_back(sc);
                    }
                }

                SubstepCheck wc{t, vi, Substep::Weights, true};
                if (substeps) wc.before = weights_objective(state, problem, hp);
                state.w = update_weights(state, problem, hp);
                if (substeps) {
                    wc.after = weights_objective(state, problem, hp);
                    substeps->push_back(wc);
                }
            }
        } catch (const NumericFailure& e) {
            throw NumericFailure(std::string(e.what()) + " (iteration " + std::to_string(t) +
                                     (e.view() >= 0 ? ", view " + std::to_string(e.view()) : std::string()) + ")",
                                 e.view(), t);
        }

        trace.push_back(record(t, state, problem, hp, start));
        const double prev = trace[trace.size() - 2].total;
        const double cur = trace.back().total;
        const double rel = std::abs(cur - prev) / std::max(std::abs(prev), std::numeric_limits<double>::min());
        quiet = rel < hp.tol_stop ? quiet + 1 : 0;
        if (quiet >= kPatience) {
            stopped = true;
            break;
        }
    }
    if (iterations) *iterations = static_cast<int>(trace.size()) - 1;
    if (converged) *converged = stopped;
}

FittedModel fit(const MultiViewDataset& dataset, Hyperparams hp, const FitOptions& options) {
    FittedModel model;
    const Problem problem = prepare(dataset, hp, model.antecedents, &model.warnings);
    model.hp = hp;
    model.state = initialize(problem, hp);
    optimize(model.state, problem, hp, model.trace, options.record_substeps ? &model.substeps : nullptr,
             &model.iterations, &model.converged);
    return model;
}

}  // namespace mvfs
