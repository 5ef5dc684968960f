#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tilda/rng.hpp"

namespace tilda {

/// A d-dimensional feature vector, e.g. the output of a pretrained
/// network used as a fixed feature extractor.
using FeatureVector = std::vector<float>;

/// Model hyperparameters. The feature dimension must be divisible by the
/// subspace count; padding is rejected because it would distort distances.
struct ModelConfig {
    std::size_t subspaces = 16;         ///< P: independent voting subspaces
    std::size_t anchors_per_class = 30; ///< k: anchor slots per class per subspace
    std::size_t dim = 0;                ///< d: feature dimension
    std::uint64_t seed = 0;             ///< seed for tie-breaking draws

    /// Throws InvalidConfig unless all fields >= 1 and dim % subspaces == 0.
    void validate() const;
};

/// Splits x into `parts` contiguous subvectors of equal length. The
/// returned spans view the input; their concatenation reproduces x exactly.
/// Throws DimensionMismatch if x.size() is not divisible by parts.
std::vector<std::span<const float>> split(std::span<const float> x,
                                          std::size_t parts);

/// Outcome of one classification.
struct Prediction {
    std::string label;
    /// Vote count per class, in class registration order, zeros included.
    /// Counts sum to P for a single input and to R for a variant vote.
    std::vector<std::pair<std::string, std::uint32_t>> votes;
    /// Winning class of each subspace (size P; empty for a variant vote).
    std::vector<std::string> subspace_decisions;
    /// True when the final majority vote was tied and a distance/order
    /// tie-break decided the label.
    bool tie_broken = false;

    /// Vote count for `cls`, 0 if the class is unknown.
    std::uint32_t votes_for(const std::string& cls) const;
};

/// Incremental classifier state: for every class and every subspace,
/// k anchor subvectors (running cluster centroids) and their counters.
///
/// Storage is C*P*k subvectors of length d/P plus one counter each,
/// independent of how many examples have been learned. Learning one
/// example touches only the presented class, so previously learned
/// classes are never degraded.
///
/// Anchors are held in double precision internally; long counter
/// histories would otherwise drift from the running-mean invariant.
///
/// Concurrency: learning mutates the store and must be serialized by the
/// caller. Prediction is const and safe from any number of threads.
class AnchorStore {
public:
    explicit AnchorStore(ModelConfig config);

    /// Learns a single labeled example. Unknown labels register a fresh
    /// all-zero anchor block. Per subspace, the updated slot is the one
    /// minimizing distance * counter (ties drawn uniformly from the store
    /// RNG), and it moves to the barycenter of its enlarged cluster:
    ///   y <- (y*n + x_p) / (n + 1),  n <- n + 1.
    void learn_one(std::span<const float> x, const std::string& label);

    /// Learns every variant in order under one label, equivalent to
    /// calling learn_one on each.
    void learn_augmented(std::span<const FeatureVector> variants,
                         const std::string& label);

    /// Classifies x: each subspace votes for the class of its nearest
    /// nonzero-counter anchor, the label is the majority vote. Vote ties
    /// fall back to the smallest summed per-subspace minimal distance,
    /// then to registration order (tie_broken is set).
    Prediction predict_one(std::span<const float> x) const;

    /// Classifies R variants of one input independently and majority-votes
    /// over their labels. Ties fall back to summed distances as above.
    Prediction predict_augmented(std::span<const FeatureVector> variants) const;

    /// Anchor payload size in bytes: C * k * d * bytes_per_real. Counters
    /// and class metadata are not included; see counter_bytes().
    std::size_t memory_footprint(std::size_t bytes_per_real) const;

    /// Size of the counter array: C * P * k * 8 bytes.
    std::size_t counter_bytes() const;

    const ModelConfig& config() const { return config_; }
    std::size_t subvector_dim() const { return sub_dim_; }

    std::size_t class_count() const { return labels_.size(); }
    const std::vector<std::string>& class_labels() const { return labels_; }
    /// Registration index of a label, or npos if never learned.
    std::size_t class_index(const std::string& label) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Number of examples learned for one class (identical across
    /// subspaces by construction) and in total.
    std::uint64_t examples_learned(std::size_t class_index) const;
    std::uint64_t total_examples() const { return total_examples_; }

    /// Anchor subvector (c, p, i), length d/P.
    std::span<const double> anchor(std::size_t c, std::size_t p,
                                   std::size_t i) const;
    std::uint64_t counter(std::size_t c, std::size_t p, std::size_t i) const;

    /// Whole per-class blocks, for snapshot comparison.
    std::span<const double> class_anchor_block(std::size_t c) const;
    std::span<const std::uint64_t> class_counter_block(std::size_t c) const;

    std::uint64_t rng_state() const { return rng_.state(); }

    /// Rebuilds a store from serialized parts. Anchors arrive in 32-bit
    /// storage precision and are widened. Throws CorruptPayload when the
    /// array sizes or counter sums are inconsistent.
    static AnchorStore restore(ModelConfig config,
                               std::vector<std::string> labels,
                               std::span<const float> anchors,
                               std::span<const std::uint64_t> counters,
                               std::uint64_t rng_state);

    bool operator==(const AnchorStore& other) const;

private:
    void check_input(std::span<const float> x) const;
    std::size_t ensure_class(const std::string& label);
    std::size_t slot_offset(std::size_t c, std::size_t p, std::size_t i) const {
        return (c * config_.subspaces + p) * config_.anchors_per_class + i;
    }

    // One full pass of the voting procedure over all subspaces.
    struct Scan {
        std::size_t winner = 0;
        std::vector<std::uint32_t> votes;          // per class
        std::vector<std::size_t> decisions;        // per subspace
        std::vector<double> distance_sums;         // per class, summed min dists
        bool tie_broken = false;
    };
    Scan scan(std::span<const float> x) const;
    std::size_t break_vote_tie(const std::vector<std::uint32_t>& votes,
                               const std::vector<double>& distance_sums,
                               bool* tie_broken) const;

    ModelConfig config_;
    std::size_t sub_dim_ = 0; // d / P
    std::vector<std::string> labels_;
    std::vector<double> anchors_;         // [c][p][i][j], class-major
    std::vector<std::uint64_t> counters_; // [c][p][i]
    std::uint64_t total_examples_ = 0;
    SplitMix64 rng_;
};

} // namespace tilda
