#include "mvfs/synth.hpp"

#include "mvfs/dataset.hpp"
#include "mvfs/errors.hpp"

#include <filesystem>
#include <random>
#include <sstream>

namespace mvfs {

int SynthSpec::dim_of(int view) const {
    if (!dims.empty()) return dims.at(static_cast<std::size_t>(view));
    return 10 + 4 * view;
}

MultiViewDataset synthesize(const SynthSpec& spec) {
    if (spec.instances < 2) throw InvalidArgument("synthetic data needs at least 2 instances");
    if (spec.views < 1) throw InvalidArgument("synthetic data needs at least 1 view");
    if (spec.clusters < 1 || spec.clusters > spec.instances) throw InvalidArgument("cluster count out of range");
    if (!(spec.noise >= 0.0)) throw InvalidArgument("noise must be non-negative");
    if (!spec.dims.empty() && static_cast<int>(spec.dims.size()) != spec.views) {
        throw InvalidArgument("dims must list one feature count per view");
    }
    for (int v = 0; v < spec.views; ++v) {
        if (spec.dim_of(v) < 1) throw InvalidArgument("feature counts must be positive");
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int latent = spec.clusters;
    const auto n = static_cast<Eigen::Index>(spec.instances);

    MultiViewDataset ds;
    for (int c = 0; c < spec.clusters; ++c) ds.class_names.push_back(std::to_string(c));
    ds.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ds.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % spec.clusters);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Eigen::Index> pick(0, i);
        std::swap(ds.labels[static_cast<std::size_t>(i)], ds.labels[static_cast<std::size_t>(pick(rng))]);
    }

    // Cluster centers sit on scaled unit axes, so all pairs are equidistant.
    Matrix latent_points(n, latent);
    for (Eigen::Index i = 0; i < n; ++i) {
        latent_points.row(i).setZero();
        latent_points(i, ds.labels[static_cast<std::size_t>(i)]) = spec.separation;
        for (Eigen::Index j = 0; j < latent; ++j) latent_points(i, j) += spec.noise * gauss(rng);
    }

    for (int v = 0; v < spec.views; ++v) {
        const int d = spec.dim_of(v);
        Matrix map(latent, d);
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index r = 0; r < latent; ++r) map(r, j) = gauss(rng);
        Matrix x = latent_points * map;
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = 0; i < n; ++i) x(i, j) += spec.noise * gauss(rng);
        ds.views.push_back({std::move(x), v});
    }
    return ds;
}

std::vector<std::string> write_dataset(const MultiViewDataset& dataset, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (std::size_t v = 0; v < dataset.view_count(); ++v) {
        const auto path = (std::filesystem::path(dir) / ("view" + std::to_string(v + 1) + ".csv")).string();
        write_csv_matrix(path, dataset.views[v].data);
        paths.push_back(path);
    }
    if (dataset.has_labels()) {
        std::ostringstream s;
        for (int y : dataset.labels) s << dataset.class_names[static_cast<std::size_t>(y)] << '\n';
        const auto path = (std::filesystem::path(dir) / "labels.csv").string();
        write_text(path, s.str());
        paths.push_back(path);
    }
    return paths;
}

}  // namespace mvfs
