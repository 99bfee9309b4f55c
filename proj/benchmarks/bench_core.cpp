#include <benchmark/benchmark.h>

#include "screeneval/bootstrap.hpp"
#include "screeneval/calibration.hpp"
#include "screeneval/metrics.hpp"
#include "screeneval/report.hpp"
#include "screeneval/simulate.hpp"

using namespace screeneval;

namespace {

// Roughly the shape of a 478-subject, ~2100-image test set.
Dataset test_like(std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.cohorts = {{"A", 29, 99}, {"B", 27, 161}, {"C", 8, 154}};
  cfg.split_fractions = {0.0, 0.0, 1.0};
  cfg.seed = seed;
  return simulate_cohort(cfg);
}

std::vector<Scored> image_scores(std::size_t per_class) {
  SimConfig cfg;
  cfg.cohorts = {{"A", per_class, per_class}};
  cfg.images_lo = cfg.images_hi = 1;
  cfg.split_fractions = {0.0, 0.0, 1.0};
  const auto groups = partition_and_group(simulate_cohort(cfg));
  return EvaluationSlice{groups, Level::image, std::nullopt, {}}.scored();
}

ArtifactSet fixed_artifacts() {
  ArtifactSet set;
  CalibrationArtifact a;
  set.add(a);
  a.level = Level::subject;
  a.strategy = VoteStrategy::max;
  set.add(a);
  a.strategy = VoteStrategy::mean;
  set.add(a);
  return set;
}

void BM_Auc(benchmark::State& state) {
  const auto scored = image_scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(auc(scored));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scored.size()));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_BestF1Threshold(benchmark::State& state) {
  const auto scored = image_scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(best_f1_threshold(scored));
}
BENCHMARK(BM_BestF1Threshold)->Arg(1000)->Arg(10000);

void BM_BootstrapImage(benchmark::State& state) {
  const EvaluationSlice slice{partition_and_group(test_like()), Level::image, std::nullopt, {}};
  BootstrapConfig cfg;
  cfg.unit = state.range(0) == 0 ? ResampleUnit::photo : ResampleUnit::subject;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(slice, kAllMetrics, cfg));
}
BENCHMARK(BM_BootstrapImage)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BootstrapSubjectRevote(benchmark::State& state) {
  const EvaluationSlice slice{partition_and_group(test_like()), Level::subject,
                              state.range(0) == 0 ? VoteStrategy::max : VoteStrategy::mean, {}};
  BootstrapConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(slice, kAllMetrics, cfg));
}
BENCHMARK(BM_BootstrapSubjectRevote)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PerformanceReport(benchmark::State& state) {
  const auto data = test_like();
  const auto artifacts = fixed_artifacts();
  for (auto _ : state) benchmark::DoNotOptimize(serialize(build_performance_report(data, artifacts, {})));
}
BENCHMARK(BM_PerformanceReport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
