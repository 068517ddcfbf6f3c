#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvfs/dataset.hpp"
#include "mvfs/errors.hpp"
#include "mvfs/representation.hpp"
#include "mvfs/serialize.hpp"
#include "mvfs/synth.hpp"
#include "support.hpp"

#include "json.hpp"

#include <filesystem>
#include <set>

using namespace mvfs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("mvfs_test_" + name + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_rows(const std::string& path, int rows, int cols) {
    std::string s;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) s += (j ? "," : "") + std::to_string(i * cols + j);
        s += "\n";
    }
    write_text(path, s);
}

}  // namespace

TEST_CASE("two views and labels load together") {
    TempDir dir("load");
    write_rows(dir.file("a.csv"), 100, 3);
    write_rows(dir.file("b.csv"), 100, 5);
    std::string labels;
    for (int i = 0; i < 100; ++i) labels += (i % 3 == 0 ? "cat\n" : "dog\n");
    write_text(dir.file("y.csv"), labels);
    const auto ds = load_dataset({dir.file("a.csv"), dir.file("b.csv")}, dir.file("y.csv"));
    CHECK(ds.instances() == 100);
    CHECK(ds.view_count() == 2);
    CHECK(ds.views[1].data.cols() == 5);
    CHECK(ds.class_count() == 2);
    CHECK(ds.class_names[0] == "cat");
    CHECK(ds.labels[1] == 1);
}

TEST_CASE("row count mismatch names both files and counts") {
    TempDir dir("mismatch");
    write_rows(dir.file("a.csv"), 100, 2);
    write_rows(dir.file("b.csv"), 99, 2);
    try {
        load_dataset({dir.file("a.csv"), dir.file("b.csv")}, std::nullopt);
        FAIL("expected a load error");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("b.csv") != std::string::npos);
        CHECK(msg.find("a.csv") != std::string::npos);
        CHECK(msg.find("99") != std::string::npos);
        CHECK(msg.find("100") != std::string::npos);
    }
}

TEST_CASE("a non-numeric cell reports its row and column") {
    TempDir dir("parse");
    write_text(dir.file("a.csv"), "1,2,3\n4,x,6\n");
    try {
        read_csv_matrix(dir.file("a.csv"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
        CHECK(e.column() == 2);
    }
    write_text(dir.file("h.csv"), "f1,f2\n1,2\n3,4\n");
    CHECK_THROWS_AS(read_csv_matrix(dir.file("h.csv")), ParseError);
    const Matrix m = read_csv_matrix(dir.file("h.csv"), true);
    CHECK(m.rows() == 2);
    CHECK(m(1, 1) == 4.0);
}

TEST_CASE("ragged rows and missing files") {
    TempDir dir("ragged");
    write_text(dir.file("a.csv"), "1,2\n3\n");
    CHECK_THROWS_AS(read_csv_matrix(dir.file("a.csv")), ParseError);
    CHECK_THROWS_AS(read_csv_matrix(dir.file("missing.csv")), LoadError);
}

TEST_CASE("a class seen once is still counted") {
    TempDir dir("rare");
    write_rows(dir.file("a.csv"), 5, 2);
    write_text(dir.file("y.csv"), "1\n1\n2\n2\n7\n");
    const auto ds = load_dataset({dir.file("a.csv")}, dir.file("y.csv"));
    CHECK(ds.class_count() == 3);
}

TEST_CASE("doubles round-trip through text") {
    for (double x : {0.1, -1e-300, 1.0 / 3.0, 12345.678901234567, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("synthetic data is reproducible and has the requested shape") {
    SynthSpec spec;
    spec.noise = 0.1;
    const auto a = synthesize(spec), b = synthesize(spec);
    CHECK(a.instances() == 200);
    CHECK(a.view_count() == 2);
    CHECK(a.views[0].data == b.views[0].data);
    CHECK(a.labels == b.labels);
    CHECK(std::set<int>(a.labels.begin(), a.labels.end()).size() == 4);

    TempDir d1("synth1"), d2("synth2");
    const auto p1 = write_dataset(a, d1.path.string());
    const auto p2 = write_dataset(b, d2.path.string());
    REQUIRE(p1.size() == 3);
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(read_text(p1[i]) == read_text(p2[i]));
    const auto back = load_dataset({p1[0], p1[1]}, p1[2]);
    CHECK(back.views[1].data == a.views[1].data);
}

TEST_CASE("noiseless synthetic clusters are coincident within a view") {
    SynthSpec spec;
    spec.noise = 0.0;
    spec.instances = 40;
    const auto ds = synthesize(spec);
    for (const auto& view : ds.views) {
        for (std::size_t i = 0; i < ds.instances(); ++i)
            for (std::size_t j = 0; j < ds.instances(); ++j) {
                if (ds.labels[i] == ds.labels[j]) {
                    CHECK(view.data.row(Eigen::Index(i)) == view.data.row(Eigen::Index(j)));
                }
            }
    }
}

TEST_CASE("model files round-trip") {
    SynthSpec spec;
    spec.instances = 50;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 5;
    hp.b_mode = BUpdateMode::ExactSolve;
    const auto model = fit(ds, hp);
    const auto text = model_to_json(model);
    const auto back = model_from_json(text);
    CHECK(model_to_json(back) == text);
    CHECK(back.hp.b_mode == BUpdateMode::ExactSolve);
    CHECK(back.hp.dim == 4);
    CHECK(embed(ds, back).data == embed(ds, model).data);
    CHECK(trace_to_csv(back.trace) == trace_to_csv(model.trace));
}

TEST_CASE("malformed model files are parse errors") {
    CHECK_THROWS_AS(model_from_json("{"), ParseError);
    CHECK_THROWS_AS(model_from_json(R"({"format":"other","version":1})"), ParseError);
    CHECK_THROWS_AS(model_from_json(R"({"format":"mvfs-model","version":99})"), ParseError);
}

TEST_CASE("trace csv has the nine columns") {
    SynthSpec spec;
    spec.instances = 30;
    Hyperparams hp;
    hp.max_iter = 0;
    const auto csv = trace_to_csv(fit(synthesize(spec), hp).trace);
    CHECK(csv.rfind("iteration,total,graph,orthogonality,consistency,b_sparsity,pc_sparsity,ps_sparsity,entropy\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("report and ablation outputs") {
    SynthSpec spec;
    spec.instances = 40;
    const auto ds = synthesize(spec);
    Hyperparams hp;
    hp.max_iter = 3;
    EvalOptions opts;
    opts.repeats = 2;
    opts.restarts = 1;
    const auto rows = ablate(ds, hp, opts);
    const auto table = ablation_table(rows);
    CHECK(table.find("common-only") != std::string::npos);
    CHECK(table.find("±") != std::string::npos);
    const auto csv = ablation_to_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const auto report = nlohmann::json::parse(report_to_json(rows[0].report));
    CHECK(report.at("nmi").at("runs").size() == 2);
}
