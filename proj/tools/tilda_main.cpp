// tilda: train, run and benchmark the incremental anchor-vector
// classifier from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tilda/augment.hpp"
#include "tilda/dataset.hpp"
#include "tilda/errors.hpp"
#include "tilda/harness.hpp"
#include "tilda/io.hpp"
#include "tilda/model.hpp"
#include "tilda/synth.hpp"

namespace {

namespace fs = std::filesystem;

/// Relative paths are resolved under TILDA_DATA_DIR when it is set.
fs::path resolve(const std::string& path) {
    const char* prefix = std::getenv("TILDA_DATA_DIR");
    fs::path p(path);
    if (prefix != nullptr && *prefix != '\0' && p.is_relative()) {
        return fs::path(prefix) / p;
    }
    return p;
}

/// Splits "features.tfv,labels.txt" pairs used by bench and synth.
std::pair<std::string, std::string> split_pair(const std::string& arg,
                                               const std::string& flag) {
    const auto comma = arg.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == arg.size()) {
        throw CLI::ValidationError(
            flag, "expected a FEATURES,LABELS pair, got '" + arg + "'");
    }
    return {arg.substr(0, comma), arg.substr(comma + 1)};
}

tilda::LabeledDataset load_dataset(const std::string& features_path,
                                   const std::string& labels_path) {
    const auto features = tilda::read_features(resolve(features_path));
    const auto labels = tilda::read_labels(resolve(labels_path));
    return tilda::make_dataset(features, labels);
}

struct TrainOptions {
    std::string features, labels, model;
    std::string method = "tilda";
    std::size_t subspaces = 16;
    std::size_t anchors = 30;
    std::uint64_t seed = 0;
};

int run_train(const TrainOptions& opt) {
    const auto method = tilda::parse_method(opt.method);
    if (method != tilda::Method::Tilda && method != tilda::Method::TildaDa &&
        method != tilda::Method::TildaP) {
        throw tilda::InvalidConfig(
            "train writes anchor-model files; method '" + opt.method +
            "' is available through `tilda bench`");
    }
    const auto data = load_dataset(opt.features, opt.labels);
    const std::size_t subspaces =
        method == tilda::Method::TildaP ? 1 : opt.subspaces;

    tilda::AnchorStore store(
        tilda::ModelConfig{subspaces, opt.anchors, data.dim, opt.seed});
    for (std::size_t i = 0; i < data.size(); ++i) {
        store.learn_one(data.row(i), data.labels[i]);
    }
    tilda::save_model(resolve(opt.model), store);
    std::cout << "trained " << data.size() << " examples, "
              << store.class_count() << " classes, model "
              << tilda::serialized_model_size(store) << " bytes\n";
    return 0;
}

struct PredictOptions {
    std::string model, features, out;
};

int run_predict(const PredictOptions& opt) {
    const auto store = tilda::load_model(resolve(opt.model));
    const auto features = tilda::read_features(resolve(opt.features));

    std::ofstream file;
    const bool csv = !opt.out.empty();
    if (csv) {
        file.open(resolve(opt.out), std::ios::trunc);
        if (!file) {
            throw tilda::IoFailure("cannot open '" + opt.out +
                                   "' for writing");
        }
        file << "index,label\n";
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto prediction = store.predict_one(features[i]);
        if (csv) {
            file << i << ',' << prediction.label << '\n';
        } else {
            std::cout << prediction.label << '\n';
        }
    }
    if (csv && !file) {
        throw tilda::IoFailure("write error on '" + opt.out + "'");
    }
    return 0;
}

struct BenchOptions {
    std::string scenario, method = "tilda";
    std::string train_pair, test_pair;
    std::string report = "text";
    std::size_t parts = 10;
    std::size_t subspaces = 16;
    std::size_t anchors = 30;
    std::uint64_t seed = 0;
    std::uint64_t order_seed = 0;
    std::size_t checkpoint_every = 0;
    bool full_test = false;
};

int run_bench(const BenchOptions& opt) {
    const auto [train_features, train_labels] =
        split_pair(opt.train_pair, "--train");
    const auto [test_features, test_labels] =
        split_pair(opt.test_pair, "--test");

    tilda::ScenarioSpec spec;
    spec.mode = tilda::parse_mode(opt.scenario);
    spec.method = tilda::parse_method(opt.method);
    spec.parts = opt.parts;
    spec.subspaces = opt.subspaces;
    spec.anchors_per_class = opt.anchors;
    spec.model_seed = opt.seed;
    spec.order_seed = opt.order_seed;
    spec.checkpoint_every = opt.checkpoint_every;
    spec.seen_classes_only = !opt.full_test;
    const auto format = tilda::parse_report_format(opt.report);

    const auto train = load_dataset(train_features, train_labels);
    const auto test = load_dataset(test_features, test_labels);
    const auto report = tilda::run_scenario(spec, train, test);
    std::cout << tilda::emit_report(report, format);
    return 0;
}

struct AugmentOptions {
    std::string images, out;
};

int run_augment(const AugmentOptions& opt) {
    const auto images = tilda::read_images(resolve(opt.images));
    std::vector<tilda::ImageTensor> variants;
    variants.reserve(images.size() * tilda::kVariantCount);
    for (const auto& img : images) {
        auto ten = tilda::generate_variants(img);
        for (auto& v : ten) variants.push_back(std::move(v));
    }
    tilda::write_images(resolve(opt.out), variants);
    std::cout << "wrote " << variants.size() << " variants of "
              << images.size() << " images\n";
    return 0;
}

struct SynthOptions {
    std::size_t classes = 2;
    std::size_t dim = 16;
    std::size_t per_class = 100;
    double separation = 6.0;
    std::uint64_t seed = 0;
    std::string out_pair;
};

int run_synth(const SynthOptions& opt) {
    const auto [features_path, labels_path] =
        split_pair(opt.out_pair, "--out");
    tilda::SynthSpec spec{opt.classes, opt.dim, opt.per_class, opt.separation,
                          opt.seed};
    const auto data = tilda::make_gaussian_clusters(spec);

    std::vector<tilda::FeatureVector> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.row(i);
        rows.emplace_back(row.begin(), row.end());
    }
    tilda::write_features(resolve(features_path), rows);
    tilda::write_labels(resolve(labels_path), data.labels);
    std::cout << "wrote " << data.size() << " examples (" << opt.classes
              << " classes, dim " << opt.dim << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"incremental anchor-vector classifier"};
    app.require_subcommand(1);

    TrainOptions train_opt;
    auto* train = app.add_subcommand(
        "train", "learn a model from a feature/label file pair");
    train->add_option("--features", train_opt.features, "TFV1 feature file")
        ->required();
    train->add_option("--labels", train_opt.labels, "label file, one per line")
        ->required();
    train->add_option("--model", train_opt.model, "output model path")
        ->required();
    train->add_option("-P,--subspaces", train_opt.subspaces,
                      "number of voting subspaces");
    train->add_option("-k,--anchors", train_opt.anchors,
                      "anchor slots per class per subspace");
    train->add_option("--seed", train_opt.seed, "tie-breaking RNG seed");
    train->add_option("--method", train_opt.method,
                      "tilda, tilda-da or tilda-p");

    PredictOptions predict_opt;
    auto* predict = app.add_subcommand(
        "predict", "classify a feature file with a trained model");
    predict->add_option("--model", predict_opt.model, "model path")
        ->required();
    predict->add_option("--features", predict_opt.features,
                        "TFV1 feature file")
        ->required();
    predict->add_option("--out", predict_opt.out,
                        "write index,label CSV here instead of stdout");

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand(
        "bench", "replay an incremental-learning scenario");
    bench->add_option("--scenario", bench_opt.scenario, "ci, ei or oneshot")
        ->required();
    bench->add_option("--method", bench_opt.method,
                      "tilda, tilda-da, tilda-p, tilda-ncm, ncm or nn");
    bench->add_option("--train", bench_opt.train_pair, "FEATURES,LABELS pair")
        ->required();
    bench->add_option("--test", bench_opt.test_pair, "FEATURES,LABELS pair")
        ->required();
    bench->add_option("--parts", bench_opt.parts, "EI part count");
    bench->add_option("-P,--subspaces", bench_opt.subspaces,
                      "number of voting subspaces");
    bench->add_option("-k,--anchors", bench_opt.anchors,
                      "anchor slots per class per subspace");
    bench->add_option("--seed", bench_opt.seed, "model seed");
    bench->add_option("--order-seed", bench_opt.order_seed,
                      "presentation order seed");
    bench->add_option("--checkpoint-every", bench_opt.checkpoint_every,
                      "one-shot: emit a row every N examples");
    bench->add_flag("--full-test", bench_opt.full_test,
                    "CI: measure accuracy on the full test set instead of "
                    "classes seen so far");
    bench->add_option("--report", bench_opt.report, "text, csv or json");

    AugmentOptions augment_opt;
    auto* augment = app.add_subcommand(
        "augment", "expand a TIM1 image container into its ten variants");
    augment->add_option("--images", augment_opt.images, "input container")
        ->required();
    augment->add_option("--out", augment_opt.out, "output container")
        ->required();

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand(
        "synth", "generate Gaussian-cluster features and labels");
    synth->add_option("--classes", synth_opt.classes, "number of classes");
    synth->add_option("--dim", synth_opt.dim, "feature dimension");
    synth->add_option("--per-class", synth_opt.per_class,
                      "examples per class");
    synth->add_option("--sep", synth_opt.separation,
                      "per-coordinate class separation in noise sigmas");
    synth->add_option("--seed", synth_opt.seed, "generator seed");
    synth->add_option("--out", synth_opt.out_pair, "FEATURES,LABELS pair")
        ->required();

    try {
        app.parse(argc, argv);
        if (train->parsed()) return run_train(train_opt);
        if (predict->parsed()) return run_predict(predict_opt);
        if (bench->parsed()) return run_bench(bench_opt);
        if (augment->parsed()) return run_augment(augment_opt);
        if (synth->parsed()) return run_synth(synth_opt);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const tilda::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const tilda::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
