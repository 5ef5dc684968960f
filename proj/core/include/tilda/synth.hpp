#pragma once

#include <cstdint>

#include "tilda/dataset.hpp"

namespace tilda {

/// Parameters for the Gaussian-cluster generator used by the benchmark
/// harness and the `synth` CLI subcommand.
struct SynthSpec {
    std::size_t classes = 2;
    std::size_t dim = 2;
    std::size_t per_class = 100;
    /// Gap between two class means along every coordinate where they
    /// differ, in units of the per-coordinate noise std (which is 1).
    /// Any two means are at least `separation` apart overall, and
    /// typically separation * sqrt(dim / 2).
    double separation = 6.0;
    /// Sampling seed. Two specs differing only in `seed` draw fresh points
    /// from the same class population, which is how paired train/test
    /// sets are made.
    std::uint64_t seed = 0;
    /// Seed for the class means themselves; change it to get a different
    /// population.
    std::uint64_t mean_seed = 1;
};

/// Generates `classes * per_class` labeled points, grouped by class.
/// Class means are distinct sign vectors scaled to +/- separation/2 per
/// coordinate, so class structure is spread over all coordinates rather
/// than packed into a few; points add isotropic unit-variance Gaussian
/// noise. Labels are "class0".."classN" in generation order. Fully
/// deterministic in the seed.
LabeledDataset make_gaussian_clusters(const SynthSpec& spec);

} // namespace tilda
