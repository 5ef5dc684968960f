#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tilda/baselines.hpp"
#include "tilda/dataset.hpp"
#include "tilda/model.hpp"

namespace tilda {

enum class ScenarioMode { ClassIncremental, ExampleIncremental, OneShot };
enum class Method { Tilda, TildaDa, TildaP, TildaNcm, Ncm, Nn };

/// Parses "ci" | "ei" | "oneshot"; throws ScenarioError otherwise.
ScenarioMode parse_mode(const std::string& name);
/// Parses "tilda" | "tilda-da" | "tilda-p" | "tilda-ncm" | "ncm" | "nn".
Method parse_method(const std::string& name);
const char* method_name(Method method);
const char* mode_name(ScenarioMode mode);

/// One benchmark run: which protocol, which method, and the model knobs.
struct ScenarioSpec {
    ScenarioMode mode = ScenarioMode::OneShot;
    Method method = Method::Tilda;
    std::size_t parts = 10;        ///< EI: number of stratified splits
    std::uint64_t order_seed = 0;  ///< presentation-order shuffles
    std::size_t subspaces = 16;    ///< P (forced to 1 for tilda-p)
    std::size_t anchors_per_class = 30; ///< k
    std::uint64_t model_seed = 0;
    /// One-shot: emit a row every N examples (0 = final row only).
    std::size_t checkpoint_every = 0;
    /// CI: measure accuracy on classes seen so far (default) or, when
    /// false, on the full test set.
    bool seen_classes_only = true;
};

struct StageRow {
    std::size_t stage = 0;
    std::size_t classes_seen = 0;
    std::size_t examples_seen = 0;
    double accuracy = 0.0;
    std::size_t model_bytes = 0;
};

struct ScenarioReport {
    std::vector<StageRow> rows;
    /// The end-state summary (the last stage); requires at least one row.
    const StageRow& final_row() const;
};

enum class ReportFormat { Text, Csv, Json };
ReportFormat parse_report_format(const std::string& name);

/// Renders a report with stable column order
/// (stage, classes, examples, accuracy, bytes).
std::string emit_report(const ScenarioReport& report, ReportFormat format);

/// Uniform streaming interface the scenario runners drive. Learning is
/// single-writer; predict_label is const and thread-safe.
class Learner {
public:
    virtual ~Learner() = default;
    virtual void learn_one(std::span<const float> x,
                           const std::string& label) = 0;
    virtual std::string predict_label(std::span<const float> x) const = 0;
    /// Current model size in bytes (serialized size for anchor models,
    /// payload accounting for the baselines).
    virtual std::size_t model_bytes() const = 0;
};

class TildaLearner final : public Learner {
public:
    explicit TildaLearner(ModelConfig config) : store_(config) {}
    void learn_one(std::span<const float> x, const std::string& label) override {
        store_.learn_one(x, label);
    }
    std::string predict_label(std::span<const float> x) const override {
        return store_.predict_one(x).label;
    }
    std::size_t model_bytes() const override;
    const AnchorStore& store() const { return store_; }

private:
    AnchorStore store_;
};

class NcmLearner final : public Learner {
public:
    explicit NcmLearner(std::size_t dim) : model_(dim) {}
    void learn_one(std::span<const float> x, const std::string& label) override {
        model_.learn_one(x, label);
    }
    std::string predict_label(std::span<const float> x) const override {
        return model_.predict_one(x);
    }
    std::size_t model_bytes() const override {
        return model_.memory_footprint(sizeof(float));
    }
    const NcmModel& model() const { return model_; }

private:
    NcmModel model_;
};

class NnLearner final : public Learner {
public:
    explicit NnLearner(std::size_t dim) : model_(dim) {}
    void learn_one(std::span<const float> x, const std::string& label) override {
        model_.learn_one(x, label);
    }
    std::string predict_label(std::span<const float> x) const override {
        return model_.predict_one(x);
    }
    std::size_t model_bytes() const override {
        return model_.memory_footprint(sizeof(float));
    }
    const NnModel& model() const { return model_; }

private:
    NnModel model_;
};

class PrototypeLearner final : public Learner {
public:
    PrototypeLearner(std::size_t dim, std::size_t prototypes_per_class,
                     std::uint64_t seed)
            : model_(dim, prototypes_per_class, seed) {}
    void learn_one(std::span<const float> x, const std::string& label) override {
        model_.learn_one(x, label);
    }
    std::string predict_label(std::span<const float> x) const override {
        return model_.predict_one(x);
    }
    std::size_t model_bytes() const override {
        return model_.memory_footprint(sizeof(float));
    }
    const RandomPrototypeModel& model() const { return model_; }

private:
    RandomPrototypeModel model_;
};

/// Builds the learner a spec asks for. tilda-p forces P=1; tilda and
/// tilda-da are identical on feature-vector input (augmentation happens
/// upstream of feature extraction, on images).
std::unique_ptr<Learner> make_learner(const ScenarioSpec& spec,
                                      std::size_t dim);

/// Fraction of test rows the learner labels correctly (unweighted).
double evaluate_accuracy(const Learner& learner, const LabeledDataset& test);

/// Presents one class at a time (seeded class order), measuring accuracy
/// after each class on the test subset of classes seen so far (or the
/// full set, per spec.seen_classes_only). One row per class.
ScenarioReport run_class_incremental(const ScenarioSpec& spec,
                                     const LabeledDataset& train,
                                     const LabeledDataset& test,
                                     Learner& learner);

/// Splits every class's examples evenly across `parts` (seeded, so part 1
/// already contains all classes) and learns one part at a time, measuring
/// full-test accuracy after each part. One row per part.
ScenarioReport run_example_incremental(const ScenarioSpec& spec,
                                       const LabeledDataset& train,
                                       const LabeledDataset& test,
                                       Learner& learner);

/// Streams all examples one at a time in seeded shuffled order. Emits
/// checkpoint rows when spec.checkpoint_every > 0 and always a final row.
ScenarioReport run_one_shot(const ScenarioSpec& spec,
                            const LabeledDataset& train,
                            const LabeledDataset& test, Learner& learner);

/// Creates the learner from the spec and dispatches on spec.mode.
ScenarioReport run_scenario(const ScenarioSpec& spec,
                            const LabeledDataset& train,
                            const LabeledDataset& test);

} // namespace tilda
