#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tilda/augment.hpp"
#include "tilda/model.hpp"
#include "tilda/rng.hpp"

namespace tilda::test {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("tilda_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline FeatureVector random_vector(std::size_t dim, SplitMix64& rng,
                                   double scale = 1.0) {
    FeatureVector x(dim);
    for (auto& v : x) v = static_cast<float>(gaussian(rng) * scale);
    return x;
}

/// Naive reference for the anchor-learning rule. It keeps every assigned
/// subvector and recomputes each anchor as the batch mean of its cluster,
/// so it checks the store's barycentric recurrence through an independent
/// route. Tie draws replicate the store's policy (uniform over slots with
/// exactly minimal distance*counter) against a same-seeded RNG.
class ReferenceLearner {
public:
    ReferenceLearner(std::size_t subspaces, std::size_t anchors,
                     std::size_t dim, std::uint64_t seed)
            : P_(subspaces), k_(anchors), d_(dim), sub_(dim / subspaces),
              rng_(seed) {}

    void learn(const FeatureVector& x, const std::string& label) {
        auto& cls = classes_[label];
        if (cls.members.empty()) {
            cls.members.assign(P_ * k_, {});
        }
        for (std::size_t p = 0; p < P_; ++p) {
            std::vector<double> xp(x.begin() + p * sub_,
                                   x.begin() + (p + 1) * sub_);
            double best = -1.0;
            std::vector<std::size_t> tied;
            for (std::size_t i = 0; i < k_; ++i) {
                const auto mean = anchor_of(cls, p, i);
                double acc = 0.0;
                for (std::size_t j = 0; j < sub_; ++j) {
                    const double diff = xp[j] - mean[j];
                    acc += diff * diff;
                }
                const double penalty =
                    std::sqrt(acc) *
                    static_cast<double>(cls.members[p * k_ + i].size());
                if (tied.empty() || penalty < best) {
                    best = penalty;
                    tied.assign(1, i);
                } else if (penalty == best) {
                    tied.push_back(i);
                }
            }
            const std::size_t slot =
                tied.size() == 1 ? tied.front() : tied[rng_.bounded(tied.size())];
            cls.members[p * k_ + slot].push_back(std::move(xp));
        }
    }

    /// Batch mean of the cluster assigned to (label, p, i).
    std::vector<double> anchor(const std::string& label, std::size_t p,
                               std::size_t i) const {
        return anchor_of(classes_.at(label), p, i);
    }

    std::size_t counter(const std::string& label, std::size_t p,
                        std::size_t i) const {
        return classes_.at(label).members[p * k_ + i].size();
    }

private:
    struct ClassState {
        // members[p * k + i] = all subvectors assigned to that slot
        std::vector<std::vector<std::vector<double>>> members;
    };

    std::vector<double> anchor_of(const ClassState& cls, std::size_t p,
                                  std::size_t i) const {
        std::vector<double> mean(sub_, 0.0);
        const auto& cluster = cls.members[p * k_ + i];
        if (cluster.empty()) return mean;
        for (const auto& member : cluster) {
            for (std::size_t j = 0; j < sub_; ++j) mean[j] += member[j];
        }
        for (auto& v : mean) v /= static_cast<double>(cluster.size());
        return mean;
    }

    std::size_t P_, k_, d_, sub_;
    std::map<std::string, ClassState> classes_;
    SplitMix64 rng_;
};

/// Test-only stand-in for a DNN feature extractor: scales pixels to [0,1].
inline FeatureVector flatten_image(const ImageTensor& img) {
    FeatureVector x;
    x.reserve(img.data.size());
    for (const auto byte : img.data) {
        x.push_back(static_cast<float>(byte) / 255.0F);
    }
    return x;
}

/// Optional second stage: fixed seeded Gaussian random projection.
inline FeatureVector project(const FeatureVector& x, std::size_t out_dim,
                             std::uint64_t seed) {
    SplitMix64 rng(seed);
    FeatureVector out(out_dim, 0.0F);
    for (std::size_t r = 0; r < out_dim; ++r) {
        double acc = 0.0;
        for (const float v : x) acc += gaussian(rng) * static_cast<double>(v);
        out[r] = static_cast<float>(acc);
    }
    return out;
}

} // namespace tilda::test
