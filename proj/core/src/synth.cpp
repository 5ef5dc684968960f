#include "tilda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "tilda/errors.hpp"
#include "tilda/rng.hpp"

namespace tilda {

void LabeledDataset::push_back(std::span<const float> x,
                               const std::string& label) {
    if (dim == 0) dim = x.size();
    if (x.size() != dim) {
        throw DimensionMismatch("dataset rows of length " +
                                std::to_string(dim) + " and " +
                                std::to_string(x.size()) + " mixed");
    }
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(label);
}

LabeledDataset make_dataset(std::span<const FeatureVector> features,
                            std::span<const std::string> labels) {
    if (features.size() != labels.size()) {
        throw DimensionMismatch("feature count " +
                                std::to_string(features.size()) +
                                " does not match label count " +
                                std::to_string(labels.size()));
    }
    LabeledDataset data;
    for (std::size_t i = 0; i < features.size(); ++i) {
        data.push_back(features[i], labels[i]);
    }
    return data;
}

LabeledDataset make_gaussian_clusters(const SynthSpec& spec) {
    if (spec.classes < 1 || spec.dim < 1 || spec.per_class < 1) {
        throw InvalidConfig("synth: classes, dim and per-class must be >= 1");
    }
    if (spec.dim < 63 &&
        spec.classes > (std::uint64_t{1} << spec.dim)) {
        throw InvalidConfig("synth: only 2^dim distinct sign-vector means "
                            "exist for dim=" + std::to_string(spec.dim));
    }
    if (spec.separation < 0.0) {
        throw InvalidConfig("synth: separation must be non-negative");
    }

    SplitMix64 rng(spec.seed);
    SplitMix64 mean_rng(spec.mean_seed);
    const double offset = spec.separation / 2.0;

    // Distinct sign vectors; class means differ by `separation` along
    // every coordinate where the signs disagree.
    std::vector<std::vector<std::int8_t>> signs;
    signs.reserve(spec.classes);
    while (signs.size() < spec.classes) {
        std::vector<std::int8_t> candidate(spec.dim);
        for (auto& s : candidate) s = mean_rng.next() & 1 ? 1 : -1;
        if (std::find(signs.begin(), signs.end(), candidate) != signs.end()) {
            continue;
        }
        signs.push_back(std::move(candidate));
    }

    LabeledDataset data;
    data.dim = spec.dim;
    data.values.reserve(spec.classes * spec.per_class * spec.dim);
    data.labels.reserve(spec.classes * spec.per_class);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const std::string label = "class" + std::to_string(c);
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            for (std::size_t j = 0; j < spec.dim; ++j) {
                const double v = gaussian(rng) + signs[c][j] * offset;
                data.values.push_back(static_cast<float>(v));
            }
            data.labels.push_back(label);
        }
    }
    return data;
}

} // namespace tilda
