#pragma once

#include "mvfs/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvfs {

/// Views share one latent cluster assignment. Each instance has a latent
/// point (cluster center plus shared jitter); view v sees it through its own
/// random linear map plus view-private noise. With zero noise the members of
/// a cluster coincide in every view.
struct SynthSpec {
    int instances = 200;
    int views = 2;
    int clusters = 4;
    double noise = 0.1;
    std::uint64_t seed = 7;
    std::vector<int> dims;  // per-view feature count; empty -> 10, 14, 18, ...
    double separation = 1.0;

    int dim_of(int view) const;
};

MultiViewDataset synthesize(const SynthSpec& spec);

/// Writes view<k>.csv (k from 1) and labels.csv into `dir`; returns the paths.
std::vector<std::string> write_dataset(const MultiViewDataset& dataset, const std::string& dir);

}  // namespace mvfs
