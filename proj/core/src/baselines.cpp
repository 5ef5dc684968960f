#include "tilda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tilda/errors.hpp"

namespace tilda {

namespace {

void check_vector(std::span<const float> x, std::size_t dim) {
    if (x.size() != dim) {
        throw DimensionMismatch("feature vector has length " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(dim));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw NonFiniteInput("feature vector entry " + std::to_string(j) +
                                 " is not finite");
        }
    }
}

double sq_distance(const float* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double diff = static_cast<double>(x[j]) - y[j];
        acc += diff * diff;
    }
    return acc;
}

double sq_distance(const float* x, const float* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double diff =
            static_cast<double>(x[j]) - static_cast<double>(y[j]);
        acc += diff * diff;
    }
    return acc;
}

std::size_t find_label(const std::vector<std::string>& labels,
                       const std::string& label) {
    for (std::size_t c = 0; c < labels.size(); ++c) {
        if (labels[c] == label) return c;
    }
    return static_cast<std::size_t>(-1);
}

} // namespace

NcmModel::NcmModel(std::size_t dim) : dim_(dim) {
    if (dim < 1) throw InvalidConfig("NCM: dim must be >= 1");
}

void NcmModel::learn_one(std::span<const float> x, const std::string& label) {
    check_vector(x, dim_);
    std::size_t c = find_label(labels_, label);
    if (c == static_cast<std::size_t>(-1)) {
        c = labels_.size();
        labels_.push_back(label);
        means_.resize(means_.size() + dim_, 0.0);
        counts_.push_back(0);
    }
    double* mean = means_.data() + c * dim_;
    const auto n = static_cast<double>(++counts_[c]);
    for (std::size_t j = 0; j < dim_; ++j) {
        mean[j] += (static_cast<double>(x[j]) - mean[j]) / n;
    }
}

std::string NcmModel::predict_one(std::span<const float> x) const {
    if (labels_.empty()) {
        throw EmptyModel("NCM predict: model has not learned any example");
    }
    check_vector(x, dim_);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        const double d = sq_distance(x.data(), means_.data() + c * dim_, dim_);
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return labels_[best];
}

std::span<const double> NcmModel::mean(std::size_t class_index) const {
    return {means_.data() + class_index * dim_, dim_};
}

std::uint64_t NcmModel::examples_learned(std::size_t class_index) const {
    return counts_[class_index];
}

std::size_t NcmModel::memory_footprint(std::size_t bytes_per_real) const {
    return labels_.size() * dim_ * bytes_per_real;
}

NnModel::NnModel(std::size_t dim) : dim_(dim) {
    if (dim < 1) throw InvalidConfig("NN: dim must be >= 1");
}

void NnModel::learn_one(std::span<const float> x, const std::string& label) {
    check_vector(x, dim_);
    values_.insert(values_.end(), x.begin(), x.end());
    labels_.push_back(label);
}

std::string NnModel::predict_one(std::span<const float> x) const {
    if (labels_.empty()) {
        throw EmptyModel("NN predict: model has not learned any example");
    }
    check_vector(x, dim_);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < labels_.size(); ++r) {
        const double d = sq_distance(x.data(), values_.data() + r * dim_, dim_);
        if (d < best_dist) {
            best_dist = d;
            best = r;
        }
    }
    return labels_[best];
}

std::size_t NnModel::memory_footprint(std::size_t bytes_per_real) const {
    std::size_t bytes = sizeof(std::uint64_t); // dim field
    for (const auto& label : labels_) {
        bytes += dim_ * bytes_per_real + sizeof(std::uint64_t) + label.size();
    }
    return bytes;
}

RandomPrototypeModel::RandomPrototypeModel(std::size_t dim,
                                           std::size_t prototypes_per_class,
                                           std::uint64_t seed)
        : dim_(dim), capacity_(prototypes_per_class), rng_(seed) {
    if (dim < 1 || prototypes_per_class < 1) {
        throw InvalidConfig("prototype model: dim and k must be >= 1");
    }
}

void RandomPrototypeModel::learn_one(std::span<const float> x,
                                     const std::string& label) {
    check_vector(x, dim_);
    std::size_t c = find_label(labels_, label);
    if (c == static_cast<std::size_t>(-1)) {
        c = labels_.size();
        labels_.push_back(label);
        reservoirs_.emplace_back();
        reservoirs_.back().reserve(capacity_ * dim_);
        seen_.push_back(0);
    }

    // Algorithm R: the m-th example replaces a uniformly chosen slot with
    // probability k/m once the reservoir is full.
    auto& reservoir = reservoirs_[c];
    const std::uint64_t m = ++seen_[c];
    if (reservoir.size() < capacity_ * dim_) {
        reservoir.insert(reservoir.end(), x.begin(), x.end());
        return;
    }
    const std::uint64_t j = rng_.bounded(m);
    if (j < capacity_) {
        std::copy(x.begin(), x.end(), reservoir.begin() + j * dim_);
    }
}

std::string RandomPrototypeModel::predict_one(std::span<const float> x) const {
    if (labels_.empty()) {
        throw EmptyModel(
            "prototype predict: model has not learned any example");
    }
    check_vector(x, dim_);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        const auto& reservoir = reservoirs_[c];
        for (std::size_t r = 0; r * dim_ < reservoir.size(); ++r) {
            const double d =
                sq_distance(x.data(), reservoir.data() + r * dim_, dim_);
            if (d < best_dist) {
                best_dist = d;
                best = c;
            }
        }
    }
    return labels_[best];
}

std::size_t RandomPrototypeModel::prototype_count(
    std::size_t class_index) const {
    return reservoirs_[class_index].size() / dim_;
}

std::span<const float> RandomPrototypeModel::prototype(
    std::size_t class_index, std::size_t slot) const {
    return {reservoirs_[class_index].data() + slot * dim_, dim_};
}

std::uint64_t RandomPrototypeModel::examples_seen(
    std::size_t class_index) const {
    return seen_[class_index];
}

std::size_t RandomPrototypeModel::memory_footprint(
    std::size_t bytes_per_real) const {
    std::size_t stored = 0;
    for (const auto& reservoir : reservoirs_) {
        stored += reservoir.size() / dim_;
    }
    return stored * dim_ * bytes_per_real;
}

} // namespace tilda
