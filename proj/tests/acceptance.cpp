// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each, nonzero exit if anything fails. Run through ctest or directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tilda/baselines.hpp"
#include "tilda/harness.hpp"
#include "tilda/io.hpp"
#include "tilda/model.hpp"
#include "tilda/rng.hpp"
#include "tilda/synth.hpp"

using namespace tilda;

namespace {

struct Checker {
    int failures = 0;
    std::ostringstream detail;
    std::string note; // shown on the result line even when passing

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            detail << "    FAILED: " << what << "\n";
        }
    }

    template <typename T>
    void expect_eq(const T& actual, const T& expected,
                   const std::string& what) {
        if (!(actual == expected)) {
            ++failures;
            detail << "    FAILED: " << what << " (actual " << actual
                   << ", expected " << expected << ")\n";
        }
    }

    void expect_near(double actual, double expected, double tolerance,
                     const std::string& what) {
        if (!(std::abs(actual - expected) <= tolerance)) {
            ++failures;
            detail << "    FAILED: " << what << " (actual " << actual
                   << ", expected " << expected << " +/- " << tolerance
                   << ")\n";
        }
    }
};

int g_failed_criteria = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<void(Checker&)>& body) {
    Checker check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.failures++;
        check.detail << "    EXCEPTION: " << e.what() << "\n";
    }
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start)
            .count();

    const bool pass = check.failures == 0;
    if (!pass) ++g_failed_criteria;
    std::printf("criterion %d: %s  [%s, %lld ms]%s%s\n", number,
                pass ? "PASS" : "FAIL", title.c_str(),
                static_cast<long long>(elapsed),
                check.note.empty() ? "" : "  ",
                check.note.c_str());
    if (!pass) {
        std::fputs(check.detail.str().c_str(), stdout);
    }
}

AnchorStore store_with_classes(std::size_t classes, ModelConfig cfg,
                               std::uint64_t data_seed) {
    AnchorStore store(cfg);
    SplitMix64 rng(data_seed);
    for (std::size_t c = 0; c < classes; ++c) {
        FeatureVector x(cfg.dim);
        for (auto& v : x) v = static_cast<float>(gaussian(rng));
        store.learn_one(x, "class" + std::to_string(c));
    }
    return store;
}

// ---- criterion 1: memory ratios ----------------------------------------

void criterion_memory_ratios(Checker& check) {
    const std::size_t real_bytes = 4;
    const auto pct = [](std::size_t model, std::size_t dataset) {
        return 100.0 * static_cast<double>(model) /
               static_cast<double>(dataset);
    };

    ModelConfig cfg{16, 30, 2048, 0};
    const auto cifar100 = store_with_classes(100, cfg, 1);
    check.expect_near(
        pct(cifar100.memory_footprint(real_bytes), 50000 * 2048 * real_bytes),
        6.0, 0.05, "TILDA memory vs 50k stored vectors, 100 classes");

    const auto cifar10 = store_with_classes(10, cfg, 2);
    check.expect_near(
        pct(cifar10.memory_footprint(real_bytes), 50000 * 2048 * real_bytes),
        0.6, 0.005, "TILDA memory vs 50k stored vectors, 10 classes");

    const auto imagenet50 = store_with_classes(50, cfg, 3);
    check.expect_near(
        pct(imagenet50.memory_footprint(real_bytes),
            45000 * 2048 * real_bytes),
        3.3, 0.05, "TILDA memory vs 45k stored vectors, 50 classes");

    NcmModel ncm(2048);
    SplitMix64 rng(4);
    for (int c = 0; c < 100; ++c) {
        FeatureVector x(2048);
        for (auto& v : x) v = static_cast<float>(gaussian(rng));
        ncm.learn_one(x, "class" + std::to_string(c));
    }
    check.expect_near(
        pct(ncm.memory_footprint(real_bytes), 50000 * 2048 * real_bytes), 0.2,
        0.005, "NCM memory vs 50k stored vectors, 100 classes");
}

// ---- criterion 2: NCM equivalence oracle --------------------------------

void criterion_ncm_equivalence(Checker& check) {
    const std::size_t d = 32, classes = 5;
    SynthSpec synth;
    synth.classes = classes;
    synth.dim = d;
    synth.per_class = 40; // 200 training examples
    synth.separation = 3.0;
    synth.seed = 20240601;
    const auto train = make_gaussian_clusters(synth);

    AnchorStore store(ModelConfig{1, 1, d, 0});
    for (std::size_t i = 0; i < train.size(); ++i) {
        store.learn_one(train.row(i), train.labels[i]);
    }

    // independent oracle: batch means, then nearest mean
    std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto [it, inserted] = sums.try_emplace(
            train.labels[i], std::vector<double>(d, 0.0), 0);
        if (inserted) order.push_back(train.labels[i]);
        const auto row = train.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            it->second.first[j] += row[j];
        }
        it->second.second += 1;
    }
    std::vector<std::vector<double>> means;
    std::vector<std::string> mean_labels;
    for (const auto& label : order) {
        auto mean = sums.at(label).first;
        for (auto& v : mean) {
            v /= static_cast<double>(sums.at(label).second);
        }
        means.push_back(std::move(mean));
        mean_labels.push_back(label);
    }

    SplitMix64 rng(77);
    std::size_t compared = 0, agreed = 0, excluded = 0;
    for (int t = 0; t < 1000; ++t) {
        FeatureVector x(d);
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = static_cast<float>(gaussian(rng) * 3.0);
        }
        // nearest and second-nearest batch means
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < means.size(); ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = x[j] - means[c][j];
                acc += diff * diff;
            }
            const double dist = std::sqrt(acc);
            if (dist < best) {
                second = best;
                best = dist;
                best_c = c;
            } else if (dist < second) {
                second = dist;
            }
        }
        if (second - best < 1e-9) {
            ++excluded;
            continue;
        }
        ++compared;
        if (store.predict_one(x).label == mean_labels[best_c]) ++agreed;
    }
    check.expect(compared + excluded == 1000, "all probes accounted for");
    check.expect_eq(agreed, compared,
                    "TILDA(k=1,P=1) agrees with batch NCM on every "
                    "non-degenerate probe");
    std::ostringstream note;
    note << agreed << "/" << compared << " agree, " << excluded
         << " excluded";
    check.note = note.str();
}

// ---- criterion 3: running-mean invariant --------------------------------

void criterion_running_mean(Checker& check) {
    const std::size_t P = 4, d = 16, sub = d / P;
    SplitMix64 rng(3033);
    std::size_t worst_stream = 0;
    double worst = 0.0;
    for (int stream_no = 0; stream_no < 50; ++stream_no) {
        const std::size_t length = 1 + rng.bounded(500);
        std::vector<FeatureVector> stream;
        stream.reserve(length);
        for (std::size_t i = 0; i < length; ++i) {
            FeatureVector x(d);
            for (auto& v : x) {
                v = static_cast<float>(gaussian(rng) * 5.0 + 1.0);
            }
            stream.push_back(std::move(x));
        }

        std::vector<double> mean(d, 0.0);
        for (const auto& x : stream) {
            for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
        }
        for (auto& v : mean) v /= static_cast<double>(length);

        for (int perm = 0; perm < 5; ++perm) {
            for (std::size_t i = stream.size(); i > 1; --i) {
                std::swap(stream[i - 1], stream[rng.bounded(i)]);
            }
            AnchorStore store(ModelConfig{P, 1, d, 0});
            for (const auto& x : stream) store.learn_one(x, "a");
            for (std::size_t p = 0; p < P; ++p) {
                const auto anchor = store.anchor(0, p, 0);
                for (std::size_t j = 0; j < sub; ++j) {
                    const double expected = mean[p * sub + j];
                    const double rel =
                        std::abs(anchor[j] - expected) /
                        std::max(1e-30, std::abs(expected));
                    if (rel > worst) {
                        worst = rel;
                        worst_stream = stream_no;
                    }
                }
            }
        }
    }
    check.expect(worst <= 1e-6,
                 "anchor vs batch mean relative error " +
                     std::to_string(worst) + " (stream " +
                     std::to_string(worst_stream) + ") within 1e-6");
    std::ostringstream note;
    note << "worst relative error " << worst;
    check.note = note.str();
}

// ---- criterion 4: counter conservation + forgetting isolation -----------

void criterion_conservation_isolation(Checker& check) {
    const std::size_t P = 8, k = 10, d = 64, classes = 20;
    AnchorStore store(ModelConfig{P, k, d, 55});
    SplitMix64 rng(56);

    std::map<std::string, std::uint64_t> learned;
    std::size_t dirty_snapshots = 0;
    for (int step = 0; step < 10000; ++step) {
        const std::string label = "class" + std::to_string(rng.bounded(classes));
        FeatureVector x(d);
        for (auto& v : x) v = static_cast<float>(gaussian(rng));

        const bool sampled = step % 100 == 0;
        std::vector<std::vector<double>> anchor_before;
        std::vector<std::vector<std::uint64_t>> counter_before;
        if (sampled) {
            for (std::size_t c = 0; c < store.class_count(); ++c) {
                const auto a = store.class_anchor_block(c);
                const auto n = store.class_counter_block(c);
                anchor_before.emplace_back(a.begin(), a.end());
                counter_before.emplace_back(n.begin(), n.end());
            }
        }

        store.learn_one(x, label);
        ++learned[label];

        if (sampled) {
            const std::size_t target = store.class_index(label);
            for (std::size_t c = 0; c < anchor_before.size(); ++c) {
                if (c == target) continue;
                const auto a = store.class_anchor_block(c);
                const auto n = store.class_counter_block(c);
                if (std::memcmp(a.data(), anchor_before[c].data(),
                                a.size() * sizeof(double)) != 0 ||
                    std::memcmp(n.data(), counter_before[c].data(),
                                n.size() * sizeof(std::uint64_t)) != 0) {
                    ++dirty_snapshots;
                }
            }
        }
    }

    check.expect_eq(store.total_examples(), std::uint64_t{10000},
                    "all 10000 examples learned");
    for (std::size_t c = 0; c < store.class_count(); ++c) {
        const auto expected = learned[store.class_labels()[c]];
        for (std::size_t p = 0; p < P; ++p) {
            std::uint64_t sum = 0;
            for (std::size_t i = 0; i < k; ++i) {
                sum += store.counter(c, p, i);
            }
            if (sum != expected) {
                check.expect(false, "counter sum mismatch at class " +
                                        std::to_string(c) + " subspace " +
                                        std::to_string(p));
            }
        }
    }
    check.expect_eq(dirty_snapshots, std::size_t{0},
                    "no bytes modified outside the learned class");
}

// ---- criterion 5: bounded state ------------------------------------------

void criterion_bounded_state(Checker& check) {
    const std::size_t d = 32, classes = 10;
    ModelConfig cfg{4, 5, d, 0};

    const auto feed = [&](Learner& learner, std::size_t n,
                          std::uint64_t seed) {
        SplitMix64 data(seed);
        for (std::size_t i = 0; i < n; ++i) {
            FeatureVector x(d);
            for (auto& v : x) v = static_cast<float>(gaussian(data));
            // the first `classes` examples introduce each class once
            const std::size_t c =
                i < classes ? i : data.bounded(classes);
            learner.learn_one(x, "class" + std::to_string(c));
        }
    };

    TildaLearner small(cfg), large(cfg);
    feed(small, 100, 7);
    feed(large, 10000, 7);
    check.expect_eq(small.store().class_count(), std::size_t{classes},
                    "small model saw every class");
    check.expect_eq(serialize_model(small.store()).size(),
                    serialize_model(large.store()).size(),
                    "serialized size after 100 vs 10000 examples");

    NnLearner nn_small(d), nn_large(d);
    feed(nn_small, 100, 8);
    feed(nn_large, 10000, 8);
    const double ratio =
        static_cast<double>(nn_large.model_bytes()) /
        static_cast<double>(nn_small.model_bytes());
    check.expect_near(ratio, 100.0, 1.0, "NN model size ratio");
    std::ostringstream note;
    note << "tilda bytes " << serialize_model(small.store()).size()
         << " at both scales, nn ratio " << ratio;
    check.note = note.str();
}

// ---- criterion 6: synthetic class-incremental run ------------------------

void criterion_class_incremental(Checker& check) {
    SynthSpec synth;
    synth.classes = 10;
    synth.dim = 64;
    synth.per_class = 500;
    synth.separation = 6.0;
    synth.seed = 424242;
    const auto train = make_gaussian_clusters(synth);
    synth.per_class = 100;
    synth.seed = 424243;
    const auto test = make_gaussian_clusters(synth);

    ScenarioSpec spec;
    spec.mode = ScenarioMode::ClassIncremental;
    spec.method = Method::Tilda;
    spec.subspaces = 4;
    spec.anchors_per_class = 5;
    spec.order_seed = 99;
    spec.model_seed = 100;

    const auto report = run_scenario(spec, train, test);
    check.expect_eq(report.rows.size(), std::size_t{10}, "one row per class");
    for (const auto& row : report.rows) {
        if (row.accuracy < 0.90) {
            check.expect(false, "stage " + std::to_string(row.stage) +
                                    " accuracy " +
                                    std::to_string(row.accuracy) +
                                    " below 0.90");
        }
    }
    check.expect(report.final_row().accuracy >= 0.95,
                 "final accuracy " +
                     std::to_string(report.final_row().accuracy) +
                     " >= 0.95");
    double min_stage = 1.0;
    for (const auto& row : report.rows) {
        min_stage = std::min(min_stage, row.accuracy);
    }
    std::ostringstream note;
    note << "final " << report.final_row().accuracy << ", min stage "
         << min_stage;
    check.note = note.str();
}

// ---- criterion 7: ablation ordering --------------------------------------

// Anisotropic fixture: three of four blocks carry class structure, the
// fourth is high-variance noise shared by all classes. Whole-vector
// methods absorb that noise; subspace voting isolates it. Class means are
// fixed (seed only drives sampling) so train/test pairs share them.
LabeledDataset anisotropic_fixture(std::size_t per_class,
                                   std::uint64_t seed) {
    const std::size_t d = 32, block = 8, classes = 5;
    SplitMix64 rng(seed);
    SplitMix64 mean_rng(777);
    std::vector<std::vector<std::int8_t>> signs;
    while (signs.size() < classes) {
        std::vector<std::int8_t> s(3 * block);
        for (auto& v : s) v = mean_rng.next() & 1 ? 1 : -1;
        if (std::find(signs.begin(), signs.end(), s) == signs.end()) {
            signs.push_back(std::move(s));
        }
    }

    LabeledDataset data;
    data.dim = d;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            FeatureVector x(d);
            for (std::size_t j = 0; j < 3 * block; ++j) {
                x[j] = static_cast<float>(gaussian(rng) +
                                          1.5 * signs[c][j]);
            }
            for (std::size_t j = 3 * block; j < d; ++j) {
                x[j] = static_cast<float>(gaussian(rng) * 12.0);
            }
            data.push_back(x, "class" + std::to_string(c));
        }
    }
    return data;
}

void criterion_ablation_ordering(Checker& check) {
    const auto train = anisotropic_fixture(200, 31001);
    const auto test = anisotropic_fixture(100, 31002);

    ScenarioSpec spec;
    spec.mode = ScenarioMode::OneShot;
    spec.subspaces = 4;
    spec.anchors_per_class = 4;
    spec.order_seed = 5;
    spec.model_seed = 6;

    const auto accuracy_of = [&](Method method) {
        spec.method = method;
        return run_scenario(spec, train, test).final_row().accuracy;
    };

    const double tilda = accuracy_of(Method::Tilda);
    const double tilda_p = accuracy_of(Method::TildaP);
    const double tilda_ncm = accuracy_of(Method::TildaNcm);

    check.expect(tilda >= tilda_p,
                 "tilda (" + std::to_string(tilda) + ") >= tilda-p (" +
                     std::to_string(tilda_p) + ")");
    check.expect(tilda >= tilda_ncm,
                 "tilda (" + std::to_string(tilda) + ") >= tilda-ncm (" +
                     std::to_string(tilda_ncm) + ")");
    std::ostringstream note;
    note << "tilda " << tilda << ", tilda-p " << tilda_p << ", tilda-ncm "
         << tilda_ncm;
    check.note = note.str();
}

// ---- criterion 8: augmentation contract -----------------------------------

void criterion_augmentation_contract(Checker& check) {
    SplitMix64 rng(881);
    ImageTensor img{8, 8, 3, {}};
    img.data.resize(8 * 8 * 3);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next());
    check.expect_eq(generate_variants(img).size(), std::size_t{10},
                    "exactly ten variants");

    bool involution = true;
    for (int trial = 0; trial < 100; ++trial) {
        ImageTensor sample{2 + rng.bounded(12), 2 + rng.bounded(12),
                           1 + rng.bounded(4), {}};
        sample.data.resize(sample.height * sample.width * sample.channels);
        for (auto& b : sample.data) {
            b = static_cast<std::uint8_t>(rng.next());
        }
        if (hflip(hflip(sample)) != sample) involution = false;
    }
    check.expect(involution, "hflip(hflip(img)) == img for 100 random images");

    AnchorStore store(ModelConfig{2, 2, 8, 0});
    for (int i = 0; i < 30; ++i) {
        FeatureVector x(8);
        for (auto& v : x) {
            v = static_cast<float>(gaussian(rng) + (i % 2 ? 3.0 : -3.0));
        }
        store.learn_one(x, i % 2 ? "pos" : "neg");
    }
    bool identical_ok = true;
    for (int t = 0; t < 20; ++t) {
        FeatureVector x(8);
        for (auto& v : x) v = static_cast<float>(gaussian(rng) * 4.0);
        const std::vector<FeatureVector> variants(10, x);
        const auto aggregate = store.predict_augmented(variants);
        const auto single = store.predict_one(x);
        if (aggregate.label != single.label) identical_ok = false;
        if (aggregate.votes_for(aggregate.label) != 10) identical_ok = false;
    }
    check.expect(identical_ok,
                 "predict_augmented over identical variants matches "
                 "predict_one");
}

// ---- criterion 9: determinism & round-trip --------------------------------

void criterion_determinism_roundtrip(Checker& check) {
    SynthSpec synth;
    synth.classes = 6;
    synth.dim = 32;
    synth.per_class = 60;
    synth.separation = 5.0;
    synth.seed = 5150;
    const auto train = make_gaussian_clusters(synth);
    synth.per_class = 20;
    synth.seed = 5151;
    const auto test = make_gaussian_clusters(synth);

    ScenarioSpec spec;
    spec.mode = ScenarioMode::ClassIncremental;
    spec.method = Method::Tilda;
    spec.subspaces = 4;
    spec.anchors_per_class = 3;
    spec.order_seed = 61;
    spec.model_seed = 62;

    const auto run_once = [&](std::vector<std::uint8_t>* model_bytes) {
        TildaLearner learner(
            ModelConfig{spec.subspaces, spec.anchors_per_class, train.dim,
                        spec.model_seed});
        const auto report =
            run_class_incremental(spec, train, test, learner);
        *model_bytes = serialize_model(learner.store());
        return report;
    };

    std::vector<std::uint8_t> bytes_a, bytes_b;
    const auto report_a = run_once(&bytes_a);
    const auto report_b = run_once(&bytes_b);
    check.expect(bytes_a == bytes_b, "equal seeds give identical model files");
    for (const auto format :
         {ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json}) {
        check.expect(emit_report(report_a, format) ==
                         emit_report(report_b, format),
                     "equal seeds give identical reports");
    }

    // save -> load -> identical predictions on 100 probes
    const auto reloaded = deserialize_model(bytes_a);
    TildaLearner learner(
        ModelConfig{spec.subspaces, spec.anchors_per_class, train.dim,
                    spec.model_seed});
    run_class_incremental(spec, train, test, learner);
    SplitMix64 rng(63);
    bool predictions_match = true;
    for (int t = 0; t < 100; ++t) {
        FeatureVector x(train.dim);
        for (auto& v : x) v = static_cast<float>(gaussian(rng) * 2.0);
        const auto a = learner.store().predict_one(x);
        const auto b = reloaded.predict_one(x);
        if (a.label != b.label || a.votes != b.votes) {
            predictions_match = false;
        }
    }
    check.expect(predictions_match,
                 "loaded model predicts identically on 100 probes");
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    run_criterion(1, "memory-ratio reproduction", criterion_memory_ratios);
    run_criterion(2, "NCM-equivalence oracle", criterion_ncm_equivalence);
    run_criterion(3, "running-mean invariant", criterion_running_mean);
    run_criterion(4, "counter conservation and forgetting isolation",
                  criterion_conservation_isolation);
    run_criterion(5, "bounded state", criterion_bounded_state);
    run_criterion(6, "synthetic class-incremental run",
                  criterion_class_incremental);
    run_criterion(7, "ablation ordering", criterion_ablation_ordering);
    run_criterion(8, "augmentation contract",
                  criterion_augmentation_contract);
    run_criterion(9, "determinism and round-trip",
                  criterion_determinism_roundtrip);

    if (g_failed_criteria != 0) {
        std::printf("%d criterion(s) failed\n", g_failed_criteria);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
