#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tilda/model.hpp"

namespace tilda {

/// A labeled feature matrix, rows stored contiguously.
struct LabeledDataset {
    std::size_t dim = 0;
    std::vector<float> values; // size() * dim
    std::vector<std::string> labels;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }

    std::span<const float> row(std::size_t i) const {
        return {values.data() + i * dim, dim};
    }

    void push_back(std::span<const float> x, const std::string& label);
};

/// Zips a feature array with its label file contents. Throws
/// DimensionMismatch when the counts or row dimensions disagree.
LabeledDataset make_dataset(std::span<const FeatureVector> features,
                            std::span<const std::string> labels);

} // namespace tilda
