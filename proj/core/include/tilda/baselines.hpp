#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tilda/rng.hpp"

namespace tilda {

/// Nearest-class-mean classifier: one running mean per class, predicts
/// the label of the closest mean under L2. Distance ties go to the
/// earlier-registered class.
class NcmModel {
public:
    explicit NcmModel(std::size_t dim);

    void learn_one(std::span<const float> x, const std::string& label);
    std::string predict_one(std::span<const float> x) const;

    std::size_t dim() const { return dim_; }
    std::size_t class_count() const { return labels_.size(); }
    const std::vector<std::string>& class_labels() const { return labels_; }
    std::span<const double> mean(std::size_t class_index) const;
    std::uint64_t examples_learned(std::size_t class_index) const;

    /// C * dim * bytes_per_real; independent of examples learned.
    std::size_t memory_footprint(std::size_t bytes_per_real) const;

private:
    std::size_t dim_;
    std::vector<std::string> labels_;
    std::vector<double> means_;        // C * dim
    std::vector<std::uint64_t> counts_;
};

/// Store-everything 1-nearest-neighbour classifier. Memory grows linearly
/// with the number of examples; it exists as the memory/accuracy foil.
/// Distance ties go to the earliest-stored example.
class NnModel {
public:
    explicit NnModel(std::size_t dim);

    void learn_one(std::span<const float> x, const std::string& label);
    std::string predict_one(std::span<const float> x) const;

    std::size_t dim() const { return dim_; }
    std::size_t stored_examples() const { return labels_.size(); }

    /// Bytes for all stored vectors plus per-record label and count fields.
    std::size_t memory_footprint(std::size_t bytes_per_real) const;

private:
    std::size_t dim_;
    std::vector<float> values_; // n * dim
    std::vector<std::string> labels_;
};

/// Keeps up to k verbatim feature vectors per class via reservoir
/// sampling (each of the m examples seen ends up stored with probability
/// k/m), predicts by nearest stored prototype over the whole vector.
class RandomPrototypeModel {
public:
    RandomPrototypeModel(std::size_t dim, std::size_t prototypes_per_class,
                         std::uint64_t seed);

    void learn_one(std::span<const float> x, const std::string& label);
    std::string predict_one(std::span<const float> x) const;

    std::size_t dim() const { return dim_; }
    std::size_t class_count() const { return labels_.size(); }
    const std::vector<std::string>& class_labels() const { return labels_; }
    std::size_t prototype_count(std::size_t class_index) const;
    std::span<const float> prototype(std::size_t class_index,
                                     std::size_t slot) const;
    std::uint64_t examples_seen(std::size_t class_index) const;

    std::size_t memory_footprint(std::size_t bytes_per_real) const;

private:
    std::size_t dim_;
    std::size_t capacity_;
    std::vector<std::string> labels_;
    std::vector<std::vector<float>> reservoirs_; // per class, filled * dim
    std::vector<std::uint64_t> seen_;
    SplitMix64 rng_;
};

} // namespace tilda
