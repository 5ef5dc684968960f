#include "tilda/harness.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tilda/errors.hpp"
#include "tilda/io.hpp"
#include "tilda/rng.hpp"

namespace tilda {

ScenarioMode parse_mode(const std::string& name) {
    if (name == "ci") return ScenarioMode::ClassIncremental;
    if (name == "ei") return ScenarioMode::ExampleIncremental;
    if (name == "oneshot") return ScenarioMode::OneShot;
    throw InvalidConfig("unknown scenario '" + name +
                        "' (expected ci, ei or oneshot)");
}

Method parse_method(const std::string& name) {
    if (name == "tilda") return Method::Tilda;
    if (name == "tilda-da") return Method::TildaDa;
    if (name == "tilda-p") return Method::TildaP;
    if (name == "tilda-ncm") return Method::TildaNcm;
    if (name == "ncm") return Method::Ncm;
    if (name == "nn") return Method::Nn;
    throw InvalidConfig("unknown method '" + name + "'");
}

const char* method_name(Method method) {
    switch (method) {
        case Method::Tilda: return "tilda";
        case Method::TildaDa: return "tilda-da";
        case Method::TildaP: return "tilda-p";
        case Method::TildaNcm: return "tilda-ncm";
        case Method::Ncm: return "ncm";
        case Method::Nn: return "nn";
    }
    return "?";
}

const char* mode_name(ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::ClassIncremental: return "ci";
        case ScenarioMode::ExampleIncremental: return "ei";
        case ScenarioMode::OneShot: return "oneshot";
    }
    return "?";
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw InvalidConfig("unknown report format '" + name +
                        "' (expected text, csv or json)");
}

const StageRow& ScenarioReport::final_row() const {
    if (rows.empty()) {
        throw ScenarioError("report has no stages");
    }
    return rows.back();
}

std::size_t TildaLearner::model_bytes() const {
    return serialized_model_size(store_);
}

std::unique_ptr<Learner> make_learner(const ScenarioSpec& spec,
                                      std::size_t dim) {
    switch (spec.method) {
        case Method::Tilda:
        case Method::TildaDa: {
            ModelConfig cfg{spec.subspaces, spec.anchors_per_class, dim,
                            spec.model_seed};
            return std::make_unique<TildaLearner>(cfg);
        }
        case Method::TildaP: {
            ModelConfig cfg{1, spec.anchors_per_class, dim, spec.model_seed};
            return std::make_unique<TildaLearner>(cfg);
        }
        case Method::TildaNcm:
            return std::make_unique<PrototypeLearner>(
                dim, spec.anchors_per_class, spec.model_seed);
        case Method::Ncm: return std::make_unique<NcmLearner>(dim);
        case Method::Nn: return std::make_unique<NnLearner>(dim);
    }
    throw ScenarioError("unknown method");
}

double evaluate_accuracy(const Learner& learner, const LabeledDataset& test) {
    if (test.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (learner.predict_label(test.row(i)) == test.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace {

void shuffle_indices(std::vector<std::size_t>& indices, SplitMix64& rng) {
    for (std::size_t i = indices.size(); i > 1; --i) {
        std::swap(indices[i - 1], indices[rng.bounded(i)]);
    }
}

// Distinct labels with their row indices, in first-occurrence order.
struct ClassGroups {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> rows;
};

ClassGroups group_by_class(const LabeledDataset& data) {
    ClassGroups groups;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto [it, inserted] =
            index.try_emplace(data.labels[i], groups.labels.size());
        if (inserted) {
            groups.labels.push_back(data.labels[i]);
            groups.rows.emplace_back();
        }
        groups.rows[it->second].push_back(i);
    }
    return groups;
}

double accuracy_on_seen(const Learner& learner, const LabeledDataset& test,
                        const std::unordered_set<std::string>& seen) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (!seen.contains(test.labels[i])) continue;
        ++total;
        if (learner.predict_label(test.row(i)) == test.labels[i]) ++correct;
    }
    if (total == 0) return 0.0;
    return static_cast<double>(correct) / static_cast<double>(total);
}

void check_dims(const ScenarioSpec& spec, const LabeledDataset& train,
                const LabeledDataset& test) {
    if (train.empty()) {
        throw ScenarioError("empty-split: no training examples");
    }
    if (test.empty()) {
        throw ScenarioError("empty-split: no test examples");
    }
    if (train.dim != test.dim) {
        throw DimensionMismatch("train dim " + std::to_string(train.dim) +
                                " differs from test dim " +
                                std::to_string(test.dim));
    }
    (void)spec;
}

} // namespace

ScenarioReport run_class_incremental(const ScenarioSpec& spec,
                                     const LabeledDataset& train,
                                     const LabeledDataset& test,
                                     Learner& learner) {
    check_dims(spec, train, test);

    ClassGroups groups = group_by_class(train);
    std::vector<std::size_t> order(groups.labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(spec.order_seed);
    shuffle_indices(order, rng);

    ScenarioReport report;
    std::unordered_set<std::string> seen;
    std::size_t examples = 0;
    for (std::size_t stage = 0; stage < order.size(); ++stage) {
        const std::size_t g = order[stage];
        for (const std::size_t row : groups.rows[g]) {
            learner.learn_one(train.row(row), train.labels[row]);
            ++examples;
        }
        seen.insert(groups.labels[g]);

        const double accuracy = spec.seen_classes_only
                                    ? accuracy_on_seen(learner, test, seen)
                                    : evaluate_accuracy(learner, test);
        report.rows.push_back({stage + 1, seen.size(), examples, accuracy,
                               learner.model_bytes()});
    }
    return report;
}

ScenarioReport run_example_incremental(const ScenarioSpec& spec,
                                       const LabeledDataset& train,
                                       const LabeledDataset& test,
                                       Learner& learner) {
    check_dims(spec, train, test);
    if (spec.parts < 1) {
        throw InvalidConfig("EI scenario needs parts >= 1");
    }

    ClassGroups groups = group_by_class(train);
    SplitMix64 rng(spec.order_seed);
    for (const auto& rows : groups.rows) {
        if (rows.size() < spec.parts) {
            throw ScenarioError(
                "stratification-impossible: a class has " +
                std::to_string(rows.size()) + " examples, needs >= " +
                std::to_string(spec.parts));
        }
    }

    // Per class: shuffle, then deal contiguous chunks whose sizes differ
    // by at most one, so part j holds floor or ceil of N_c / parts.
    std::vector<std::vector<std::size_t>> parts(spec.parts);
    for (auto& rows : groups.rows) {
        shuffle_indices(rows, rng);
        const std::size_t base = rows.size() / spec.parts;
        const std::size_t extra = rows.size() % spec.parts;
        std::size_t cursor = 0;
        for (std::size_t j = 0; j < spec.parts; ++j) {
            const std::size_t take = base + (j < extra ? 1 : 0);
            for (std::size_t t = 0; t < take; ++t) {
                parts[j].push_back(rows[cursor++]);
            }
        }
    }

    ScenarioReport report;
    std::size_t examples = 0;
    for (std::size_t j = 0; j < spec.parts; ++j) {
        shuffle_indices(parts[j], rng); // mix classes within the part
        for (const std::size_t row : parts[j]) {
            learner.learn_one(train.row(row), train.labels[row]);
            ++examples;
        }
        report.rows.push_back({j + 1, groups.labels.size(), examples,
                               evaluate_accuracy(learner, test),
                               learner.model_bytes()});
    }
    return report;
}

ScenarioReport run_one_shot(const ScenarioSpec& spec,
                            const LabeledDataset& train,
                            const LabeledDataset& test, Learner& learner) {
    check_dims(spec, train, test);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(spec.order_seed);
    shuffle_indices(order, rng);

    ScenarioReport report;
    std::unordered_set<std::string> seen;
    std::size_t stage = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        learner.learn_one(train.row(order[i]), train.labels[order[i]]);
        seen.insert(train.labels[order[i]]);
        const bool at_checkpoint = spec.checkpoint_every > 0 &&
                                   (i + 1) % spec.checkpoint_every == 0;
        const bool last = i + 1 == order.size();
        if (at_checkpoint || last) {
            report.rows.push_back({++stage, seen.size(), i + 1,
                                   evaluate_accuracy(learner, test),
                                   learner.model_bytes()});
            if (last) break;
        }
    }
    return report;
}

ScenarioReport run_scenario(const ScenarioSpec& spec,
                            const LabeledDataset& train,
                            const LabeledDataset& test) {
    check_dims(spec, train, test);
    auto learner = make_learner(spec, train.dim);
    switch (spec.mode) {
        case ScenarioMode::ClassIncremental:
            return run_class_incremental(spec, train, test, *learner);
        case ScenarioMode::ExampleIncremental:
            return run_example_incremental(spec, train, test, *learner);
        case ScenarioMode::OneShot:
            return run_one_shot(spec, train, test, *learner);
    }
    throw ScenarioError("unknown scenario mode");
}

namespace {

std::string format_accuracy(double accuracy) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << accuracy;
    return out.str();
}

} // namespace

std::string emit_report(const ScenarioReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Csv: {
            std::ostringstream out;
            out << "stage,classes,examples,accuracy,bytes\n";
            for (const auto& row : report.rows) {
                out << row.stage << ',' << row.classes_seen << ','
                    << row.examples_seen << ',' << format_accuracy(row.accuracy)
                    << ',' << row.model_bytes << '\n';
            }
            return out.str();
        }
        case ReportFormat::Json: {
            nlohmann::json doc;
            doc["columns"] = {"stage", "classes", "examples", "accuracy",
                              "bytes"};
            doc["rows"] = nlohmann::json::array();
            for (const auto& row : report.rows) {
                doc["rows"].push_back({{"stage", row.stage},
                                       {"classes", row.classes_seen},
                                       {"examples", row.examples_seen},
                                       {"accuracy", row.accuracy},
                                       {"bytes", row.model_bytes}});
            }
            if (report.rows.empty()) {
                doc["final"] = nullptr;
            } else {
                const auto& f = report.final_row();
                doc["final"] = {{"stage", f.stage},
                                {"classes", f.classes_seen},
                                {"examples", f.examples_seen},
                                {"accuracy", f.accuracy},
                                {"bytes", f.model_bytes}};
            }
            return doc.dump(2) + "\n";
        }
        case ReportFormat::Text: {
            std::ostringstream out;
            out << std::setw(6) << "stage" << std::setw(9) << "classes"
                << std::setw(10) << "examples" << std::setw(10) << "accuracy"
                << std::setw(12) << "bytes" << '\n';
            for (const auto& row : report.rows) {
                out << std::setw(6) << row.stage << std::setw(9)
                    << row.classes_seen << std::setw(10) << row.examples_seen
                    << std::setw(10) << format_accuracy(row.accuracy)
                    << std::setw(12) << row.model_bytes << '\n';
            }
            if (!report.rows.empty()) {
                const auto& f = report.final_row();
                out << std::setw(6) << "final" << std::setw(9)
                    << f.classes_seen << std::setw(10) << f.examples_seen
                    << std::setw(10) << format_accuracy(f.accuracy)
                    << std::setw(12) << f.model_bytes << '\n';
            }
            return out.str();
        }
    }
    throw ScenarioError("unknown report format");
}

} // namespace tilda
