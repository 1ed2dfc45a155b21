#include <benchmark/benchmark.h>

#include <vector>

#include "nanophase/mixture.hpp"
#include "nanophase/model_select.hpp"
#include "nanophase/presets.hpp"
#include "nanophase/random.hpp"
#include "nanophase/stats.hpp"
#include "nanophase/validation.hpp"

using namespace nanophase;

namespace {

FeatureMatrix preset_points(const char* name, std::size_t n) { return sample(find_preset(name)->model, n, 1).points; }

void BM_EStep1D(benchmark::State& state) {
  const auto& model = find_preset("cucr25-1d-E")->model;
  const FeatureMatrix data = preset_points("cucr25-1d-E", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(e_step(data, model));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EStep1D)->Arg(500)->Arg(5000);

void BM_FitEm(benchmark::State& state) {
  const char* name = state.range(0) == 1 ? "cucr25-1d-E" : "cucr25-2d";
  const FeatureMatrix data = preset_points(name, 513);
  FitConfig cfg;
  cfg.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(fit_em(data, 3, cfg));
}
BENCHMARK(BM_FitEm)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_BicSweep(benchmark::State& state) {
  const FeatureMatrix data = preset_points("cucr25-1d-E", 513);
  SweepConfig cfg;
  cfg.k_max = 9;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sweep(data, cfg));
}
BENCHMARK(BM_BicSweep)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const FeatureMatrix data = preset_points("cucr60-merged-2d", 574);
  CvConfig cfg;
  cfg.threads = 1;
  const Labeling truth = ground_truth_labels(data, 3, cfg.fit);
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(data, truth.labels, cfg));
}
BENCHMARK(BM_CrossValidate)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const FeatureMatrix data = preset_points("cucr60-merged-2d", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(data, 3, 7));
}
BENCHMARK(BM_KMeans)->Arg(574)->Arg(5000);

void BM_AdjustedRand(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<int> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<int>(rng.below(4));
    b[i] = static_cast<int>(rng.below(4));
  }
  for (auto _ : state) benchmark::DoNotOptimize(adjusted_rand(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdjustedRand)->Arg(100)->Arg(10000);

void BM_ShapiroWilk(benchmark::State& state) {
  Rng rng(6);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (double& v : x) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(shapiro_wilk(x));
}
BENCHMARK(BM_ShapiroWilk)->Arg(30)->Arg(500)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
