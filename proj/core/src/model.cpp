#include "tilda/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "tilda/errors.hpp"

namespace tilda {

void ModelConfig::validate() const {
    if (subspaces < 1 || anchors_per_class < 1 || dim < 1) {
        throw InvalidConfig("model config: P, k and d must all be >= 1");
    }
    if (dim % subspaces != 0) {
        throw InvalidConfig("model config: d=" + std::to_string(dim) +
                            " is not divisible by P=" + std::to_string(subspaces));
    }
}

std::vector<std::span<const float>> split(std::span<const float> x,
                                          std::size_t parts) {
    if (parts < 1 || x.size() % parts != 0) {
        throw DimensionMismatch("split: length " + std::to_string(x.size()) +
                                " is not divisible into " +
                                std::to_string(parts) + " parts");
    }
    const std::size_t len = x.size() / parts;
    std::vector<std::span<const float>> out;
    out.reserve(parts);
    for (std::size_t p = 0; p < parts; ++p) {
        out.push_back(x.subspan(p * len, len));
    }
    return out;
}

std::uint32_t Prediction::votes_for(const std::string& cls) const {
    for (const auto& [name, count] : votes) {
        if (name == cls) return count;
    }
    return 0;
}

namespace {

double l2_distance(const float* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double diff = static_cast<double>(x[j]) - y[j];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

} // namespace

AnchorStore::AnchorStore(ModelConfig config)
        : config_(config), rng_(config.seed) {
    config_.validate();
    sub_dim_ = config_.dim / config_.subspaces;
}

void AnchorStore::check_input(std::span<const float> x) const {
    if (x.size() != config_.dim) {
        throw DimensionMismatch("feature vector has length " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(config_.dim));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw NonFiniteInput("feature vector entry " + std::to_string(j) +
                                 " is not finite");
        }
    }
}

std::size_t AnchorStore::class_index(const std::string& label) const {
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        if (labels_[c] == label) return c;
    }
    return npos;
}

std::size_t AnchorStore::ensure_class(const std::string& label) {
    const std::size_t existing = class_index(label);
    if (existing != npos) return existing;
    labels_.push_back(label);
    anchors_.resize(anchors_.size() +
                        config_.subspaces * config_.anchors_per_class * sub_dim_,
                    0.0);
    counters_.resize(counters_.size() +
                         config_.subspaces * config_.anchors_per_class,
                     0);
    return labels_.size() - 1;
}

void AnchorStore::learn_one(std::span<const float> x, const std::string& label) {
    check_input(x);
    const std::size_t c = ensure_class(label);
    const std::size_t k = config_.anchors_per_class;

    std::vector<std::size_t> tied;
    tied.reserve(k);
    for (std::size_t p = 0; p < config_.subspaces; ++p) {
        const float* xp = x.data() + p * sub_dim_;

        // Slot choice: minimize distance * counter. The counter weight keeps
        // cluster sizes balanced instead of funneling everything into the
        // nearest anchor.
        double best = std::numeric_limits<double>::infinity();
        tied.clear();
        for (std::size_t i = 0; i < k; ++i) {
            const double dist =
                l2_distance(xp, anchor(c, p, i).data(), sub_dim_);
            const double penalty =
                dist * static_cast<double>(counters_[slot_offset(c, p, i)]);
            if (penalty < best) {
                best = penalty;
                tied.clear();
                tied.push_back(i);
            } else if (penalty == best) {
                tied.push_back(i);
            }
        }
        const std::size_t slot =
            tied.size() == 1 ? tied.front() : tied[rng_.bounded(tied.size())];

        const std::size_t off = slot_offset(c, p, slot);
        double* y = anchors_.data() + off * sub_dim_;
        const auto n = static_cast<double>(counters_[off]);
        for (std::size_t j = 0; j < sub_dim_; ++j) {
            y[j] = (y[j] * n + static_cast<double>(xp[j])) / (n + 1.0);
        }
        counters_[off] += 1;
    }
    total_examples_ += 1;
}

void AnchorStore::learn_augmented(std::span<const FeatureVector> variants,
                                  const std::string& label) {
    if (variants.empty()) {
        throw DimensionMismatch("learn_augmented: empty variant list");
    }
    for (const auto& v : variants) {
        learn_one(v, label);
    }
}

AnchorStore::Scan AnchorStore::scan(std::span<const float> x) const {
    const std::size_t n_classes = labels_.size();
    const std::size_t k = config_.anchors_per_class;

    Scan result;
    result.votes.assign(n_classes, 0);
    result.distance_sums.assign(n_classes, 0.0);
    result.decisions.resize(config_.subspaces);

    std::vector<double> min_dist(n_classes);
    for (std::size_t p = 0; p < config_.subspaces; ++p) {
        const float* xp = x.data() + p * sub_dim_;
        for (std::size_t c = 0; c < n_classes; ++c) {
            double mind = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                if (counters_[slot_offset(c, p, i)] == 0) continue;
                mind = std::min(
                    mind, l2_distance(xp, anchor(c, p, i).data(), sub_dim_));
            }
            min_dist[c] = mind;
            result.distance_sums[c] += mind;
        }

        std::size_t winner = 0;
        for (std::size_t c = 1; c < n_classes; ++c) {
            if (min_dist[c] < min_dist[winner]) winner = c;
        }
        // Exact distance tie between classes: prefer the class whose active
        // anchors sit closer in aggregate within this subspace, then the
        // earlier-registered class.
        double winner_sum = -1.0;
        for (std::size_t c = winner + 1; c < n_classes; ++c) {
            if (min_dist[c] != min_dist[winner]) continue;
            if (winner_sum < 0.0) {
                winner_sum = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    if (counters_[slot_offset(winner, p, i)] == 0) continue;
                    winner_sum +=
                        l2_distance(xp, anchor(winner, p, i).data(), sub_dim_);
                }
            }
            double c_sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (counters_[slot_offset(c, p, i)] == 0) continue;
                c_sum += l2_distance(xp, anchor(c, p, i).data(), sub_dim_);
            }
            if (c_sum < winner_sum) {
                winner = c;
                winner_sum = c_sum;
            }
        }

        result.votes[winner] += 1;
        result.decisions[p] = winner;
    }

    result.winner = break_vote_tie(result.votes, result.distance_sums,
                                   &result.tie_broken);
    return result;
}

std::size_t AnchorStore::break_vote_tie(const std::vector<std::uint32_t>& votes,
                                        const std::vector<double>& distance_sums,
                                        bool* tie_broken) const {
    std::size_t winner = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[winner]) winner = c;
    }
    for (std::size_t c = 0; c < votes.size(); ++c) {
        if (c == winner || votes[c] != votes[winner]) continue;
        *tie_broken = true;
        if (distance_sums[c] < distance_sums[winner]) winner = c;
    }
    return winner;
}

Prediction AnchorStore::predict_one(std::span<const float> x) const {
    if (labels_.empty()) {
        throw EmptyModel("predict: model has not learned any example");
    }
    check_input(x);
    const Scan s = scan(x);

    Prediction out;
    out.label = labels_[s.winner];
    out.tie_broken = s.tie_broken;
    out.votes.reserve(labels_.size());
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        out.votes.emplace_back(labels_[c], s.votes[c]);
    }
    out.subspace_decisions.reserve(s.decisions.size());
    for (const std::size_t c : s.decisions) {
        out.subspace_decisions.push_back(labels_[c]);
    }
    return out;
}

Prediction AnchorStore::predict_augmented(
    std::span<const FeatureVector> variants) const {
    if (variants.empty()) {
        throw DimensionMismatch("predict_augmented: empty variant list");
    }
    if (labels_.empty()) {
        throw EmptyModel("predict: model has not learned any example");
    }

    std::vector<std::uint32_t> votes(labels_.size(), 0);
    std::vector<double> total_sums(labels_.size(), 0.0);
    for (const auto& v : variants) {
        check_input(v);
        const Scan s = scan(v);
        votes[s.winner] += 1;
        for (std::size_t c = 0; c < labels_.size(); ++c) {
            total_sums[c] += s.distance_sums[c];
        }
    }

    Prediction out;
    const std::size_t winner = break_vote_tie(votes, total_sums, &out.tie_broken);
    out.label = labels_[winner];
    out.votes.reserve(labels_.size());
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        out.votes.emplace_back(labels_[c], votes[c]);
    }
    return out;
}

std::size_t AnchorStore::memory_footprint(std::size_t bytes_per_real) const {
    return labels_.size() * config_.anchors_per_class * config_.dim *
           bytes_per_real;
}

std::size_t AnchorStore::counter_bytes() const {
    return counters_.size() * sizeof(std::uint64_t);
}

std::uint64_t AnchorStore::examples_learned(std::size_t class_index) const {
    std::uint64_t total = 0;
    const std::size_t k = config_.anchors_per_class;
    for (std::size_t i = 0; i < k; ++i) {
        total += counters_[slot_offset(class_index, 0, i)];
    }
    return total;
}

std::span<const double> AnchorStore::anchor(std::size_t c, std::size_t p,
                                            std::size_t i) const {
    return {anchors_.data() + slot_offset(c, p, i) * sub_dim_, sub_dim_};
}

std::uint64_t AnchorStore::counter(std::size_t c, std::size_t p,
                                   std::size_t i) const {
    return counters_[slot_offset(c, p, i)];
}

std::span<const double> AnchorStore::class_anchor_block(std::size_t c) const {
    const std::size_t per_class =
        config_.subspaces * config_.anchors_per_class * sub_dim_;
    return {anchors_.data() + c * per_class, per_class};
}

std::span<const std::uint64_t> AnchorStore::class_counter_block(
    std::size_t c) const {
    const std::size_t per_class = config_.subspaces * config_.anchors_per_class;
    return {counters_.data() + c * per_class, per_class};
}

AnchorStore AnchorStore::restore(ModelConfig config,
                                 std::vector<std::string> labels,
                                 std::span<const float> anchors,
                                 std::span<const std::uint64_t> counters,
                                 std::uint64_t rng_state) {
    AnchorStore store(config);
    const std::size_t slots =
        labels.size() * config.subspaces * config.anchors_per_class;
    if (anchors.size() != slots * store.sub_dim_ || counters.size() != slots) {
        throw CorruptPayload("model payload size does not match class table");
    }

    for (std::size_t a = 0; a < labels.size(); ++a) {
        for (std::size_t b = a + 1; b < labels.size(); ++b) {
            if (labels[a] == labels[b]) {
                throw CorruptPayload("duplicate class label '" + labels[a] +
                                     "'");
            }
        }
    }

    store.labels_ = std::move(labels);
    store.anchors_.assign(anchors.begin(), anchors.end());
    store.counters_.assign(counters.begin(), counters.end());
    store.rng_.set_state(rng_state);

    for (std::size_t idx = 0; idx < anchors.size(); ++idx) {
        if (!std::isfinite(anchors[idx])) {
            throw CorruptPayload("model anchor payload contains a non-finite value");
        }
    }
    for (std::size_t c = 0; c < store.labels_.size(); ++c) {
        const std::uint64_t per_class = store.examples_learned(c);
        if (per_class == 0) {
            throw CorruptPayload("class '" + store.labels_[c] +
                                 "' has no learned examples");
        }
        for (std::size_t p = 1; p < config.subspaces; ++p) {
            std::uint64_t sum = 0;
            for (std::size_t i = 0; i < config.anchors_per_class; ++i) {
                sum += store.counters_[store.slot_offset(c, p, i)];
            }
            if (sum != per_class) {
                throw CorruptPayload("counter sums differ across subspaces");
            }
        }
        for (std::size_t p = 0; p < config.subspaces; ++p) {
            for (std::size_t i = 0; i < config.anchors_per_class; ++i) {
                if (store.counters_[store.slot_offset(c, p, i)] != 0) continue;
                for (const double v : store.anchor(c, p, i)) {
                    if (v != 0.0) {
                        throw CorruptPayload(
                            "anchor with zero counter is not the zero vector");
                    }
                }
            }
        }
        store.total_examples_ += per_class;
    }
    return store;
}

bool AnchorStore::operator==(const AnchorStore& other) const {
    return config_.subspaces == other.config_.subspaces &&
           config_.anchors_per_class == other.config_.anchors_per_class &&
           config_.dim == other.config_.dim &&
           config_.seed == other.config_.seed && labels_ == other.labels_ &&
           counters_ == other.counters_ &&
           total_examples_ == other.total_examples_ &&
           rng_.state() == other.rng_.state() &&
           anchors_.size() == other.anchors_.size() &&
           (anchors_.empty() ||
            std::memcmp(anchors_.data(), other.anchors_.data(),
                        anchors_.size() * sizeof(double)) == 0);
}

} // namespace tilda
