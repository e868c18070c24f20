#include <benchmark/benchmark.h>

#include <set>
#include <vector>

#include "cashml/classifiers.hpp"
#include "cashml/metrics.hpp"
#include "cashml/optimizer.hpp"
#include "cashml/pipeline.hpp"
#include "cashml/search_space.hpp"
#include "cashml/synth.hpp"

using namespace cashml;

namespace {

FeatureDataset bench_data(std::size_t n, std::size_t features) {
    SynthSpec spec;
    spec.n_samples = n;
    spec.n_signal_features = features / 5;
    spec.n_noise_features = features - features / 5;
    spec.class_separation = 1.5;
    spec.seed = 42;
    return generate(spec);
}

std::size_t n_groups(const FeatureDataset& d) {
    return std::set<std::string>(d.group_tags.begin(), d.group_tags.end()).size();
}

}  // namespace

static void BM_SampleConfig(benchmark::State& state) {
    const SearchSpace space = default_space(true);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample(space, seed++));
}
BENCHMARK(BM_SampleConfig);

static void BM_Auc(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<int> y(n);
    std::vector<double> s(n);
    Rng rng(7);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.bernoulli(0.5) ? 1 : 0;
        s[i] = rng.uniform();
    }
    y[0] = 0;
    y[n - 1] = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(auc(y, s));
}
BENCHMARK(BM_Auc)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_FitWorkflow(benchmark::State& state) {
    const FeatureDataset d = bench_data(100, 50);
    const SearchSpace space = default_space(true, n_groups(d));
    // a fixed representative configuration
    WorkflowConfig cfg = sample(space, 3);
    cfg.classifier = ClassifierChoice::logistic_regression;
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_workflow(cfg, d));
}
BENCHMARK(BM_FitWorkflow);

static void BM_EvaluateWorkflow(benchmark::State& state) {
    const FeatureDataset d = bench_data(100, 50);
    const SearchSpace space = default_space(true, n_groups(d));
    const auto splits = make_validation_splits(d, 5, 0.2, 11);
    WorkflowConfig cfg = sample(space, 3);
    cfg.classifier = ClassifierChoice::logistic_regression;
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_workflow(cfg, d, splits, 0));
}
BENCHMARK(BM_EvaluateWorkflow);

static void BM_Optimize(benchmark::State& state) {
    const FeatureDataset d = bench_data(100, 50);
    const SearchSpace space = default_space(true, n_groups(d));
    OptimizerConfig cfg;
    cfg.n_random_search = static_cast<int>(state.range(0));
    cfg.n_ensemble = 3;
    cfg.k_training = 3;
    cfg.master_seed = 5;
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize(d, space, cfg));
}
BENCHMARK(BM_Optimize)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
