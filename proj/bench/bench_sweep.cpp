// Serial reference vs OpenMP mask-and-impute sweep on synthetic tensors.
#include <benchmark/benchmark.h>

#include "gsi/evaluation.hpp"
#include "gsi/synthgen.hpp"

namespace {

gsi::SyntheticInstance make_instance(std::int64_t n_a) {
  gsi::SyntheticSpec spec;
  spec.n_a = static_cast<gsi::Index>(n_a);
  spec.n_b = 40;
  spec.dim = 3;
  spec.rank = 2;
  spec.noise_std = 0.1;
  spec.missing_fraction = 0.3;
  spec.seed = 11;
  return gsi::generate(spec);
}

std::vector<gsi::EstimatorConfig> configs() {
  gsi::EstimatorConfig si;
  si.kind = gsi::EstimatorKind::SI_A;
  si.k = 4;
  gsi::EstimatorConfig g = si;
  g.kind = gsi::EstimatorKind::GSI_AB;
  gsi::EstimatorConfig gr = si;
  gr.kind = gsi::EstimatorKind::GSIReg_AB;
  gr.solver.lambda = 1.0;
  gr.solver.max_iters = 200;
  return {si, g, gr};
}

void BM_SweepSerial(benchmark::State& state) {
  const auto inst = make_instance(state.range(0));
  const auto cells = gsi::sample_observed_cells(inst.observed_tensor, 200, 1);
  const auto cfg = configs();
  for (auto _ : state) {
    auto rep = gsi::mask_and_impute_serial(inst.observed_tensor, cfg, cells);
    benchmark::DoNotOptimize(rep.per_target.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto inst = make_instance(state.range(0));
  const auto cells = gsi::sample_observed_cells(inst.observed_tensor, 200, 1);
  const auto cfg = configs();
  for (auto _ : state) {
    auto rep = gsi::mask_and_impute(inst.observed_tensor, cfg, cells);
    benchmark::DoNotOptimize(rep.per_target.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells.size()));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
