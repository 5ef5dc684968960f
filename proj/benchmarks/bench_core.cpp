#include <benchmark/benchmark.h>

#include <vector>

#include "tilda/augment.hpp"
#include "tilda/model.hpp"
#include "tilda/rng.hpp"

namespace {

using tilda::AnchorStore;
using tilda::FeatureVector;
using tilda::ModelConfig;

std::vector<FeatureVector> random_batch(std::size_t n, std::size_t dim,
                                        std::uint64_t seed) {
    tilda::SplitMix64 rng(seed);
    std::vector<FeatureVector> out(n, FeatureVector(dim));
    for (auto& x : out) {
        for (auto& v : x) v = static_cast<float>(tilda::gaussian(rng));
    }
    return out;
}

void BM_LearnOne(benchmark::State& state) {
    const auto classes = static_cast<std::size_t>(state.range(0));
    AnchorStore store(ModelConfig{16, 30, 2048, 1});
    const auto batch = random_batch(256, 2048, 2);
    std::size_t i = 0;
    for (auto _ : state) {
        store.learn_one(batch[i % batch.size()],
                        "class" + std::to_string(i % classes));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(i));
}
BENCHMARK(BM_LearnOne)->Arg(10)->Arg(100);

void BM_PredictOne(benchmark::State& state) {
    const auto classes = static_cast<std::size_t>(state.range(0));
    AnchorStore store(ModelConfig{16, 30, 2048, 1});
    const auto train = random_batch(classes * 30, 2048, 3);
    for (std::size_t i = 0; i < train.size(); ++i) {
        store.learn_one(train[i], "class" + std::to_string(i % classes));
    }
    const auto probes = random_batch(64, 2048, 4);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(store.predict_one(probes[i % probes.size()]));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(i));
}
BENCHMARK(BM_PredictOne)->Arg(10)->Arg(100);

void BM_GenerateVariants(benchmark::State& state) {
    tilda::SplitMix64 rng(5);
    tilda::ImageTensor img{32, 32, 3, {}};
    img.data.resize(32 * 32 * 3);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next());
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilda::generate_variants(img));
    }
}
BENCHMARK(BM_GenerateVariants);

} // namespace

BENCHMARK_MAIN();
