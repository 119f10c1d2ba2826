// Google Benchmark: hot paths of the specband library — the combinatorial
// log-determinant sum, ensemble sampling, spectral statistics, and the
// Monte Carlo trial loop.
#include <benchmark/benchmark.h>

#include <cmath>

#include "specband/ensembles.hpp"
#include "specband/harness.hpp"
#include "specband/mimo.hpp"
#include "specband/rng.hpp"
#include "specband/spectral.hpp"

using namespace specband;

static ens::EnsembleConfig make_ensemble(int n, int m) {
  ens::EnsembleConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.measure = ens::MeasureSpec::gaussian();
  cfg.seed = 0xC0FFEE;
  return cfg;
}

static void BM_RFunction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::r_function(0.2, n, 2 * n));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RFunction)->ArgName("n")->Arg(32)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_SampleReal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cfg = make_ensemble(n, 2 * n);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    cfg.seed = trial_seed(0xC0FFEE, trial++);
    benchmark::DoNotOptimize(ens::sample_real(cfg).sum());
  }
  state.SetItemsProcessed(state.iterations() * n * 2 * n);
}
BENCHMARK(BM_SampleReal)->ArgName("n")->Arg(16)->Arg(64)->Arg(256);

static void BM_SampleTruncated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cfg = make_ensemble(n, 2 * n);
  cfg.measure = ens::MeasureSpec::symmetric_exponential(1.0);
  const auto params = ens::truncation_params(cfg.measure, 2 * n, n, 1.0);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    cfg.seed = trial_seed(0xC0FFEE, trial++);
    const Eigen::MatrixXd M = ens::sample_real(cfg);
    benchmark::DoNotOptimize(ens::truncate_matrix(M, params.tau_c).sum());
  }
  state.SetItemsProcessed(state.iterations() * n * 2 * n);
}
BENCHMARK(BM_SampleTruncated)->ArgName("n")->Arg(16)->Arg(64)->Arg(256);

static void BM_MutualInformation(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  const auto cfg = make_ensemble(n_r, 2 * n_r);
  const Eigen::MatrixXd H = ens::sample_real(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::mutual_information(H, 5.0));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MutualInformation)
    ->ArgName("n_r")
    ->Arg(16)
    ->Arg(64)
    ->Arg(128)
    ->Unit(benchmark::kMicrosecond);

static void BM_EvalF0(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto cfg = make_ensemble(n, 2 * n);
  const Eigen::MatrixXd M = ens::sample_real(cfg);
  const auto stat = spectral::SpectralStatistic::log_shifted(0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral::eval_f0(M, stat));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalF0)
    ->ArgName("n")
    ->Arg(16)
    ->Arg(64)
    ->Arg(128)
    ->Unit(benchmark::kMicrosecond);

static void BM_RunTrials(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  harness::ExperimentConfig cfg;
  cfg.metric = harness::Metric::mutual_info;
  cfg.ensemble = make_ensemble(n_r, 2 * n_r);
  cfg.snr = 5.0;
  cfg.trials = 100;
  cfg.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::run_trials(cfg, 1).size());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_RunTrials)
    ->ArgName("n_r")
    ->Arg(16)
    ->Arg(32)
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
