#include <benchmark/benchmark.h>

#include "dvfsim/experiment.hpp"
#include "dvfsim/freq_lp.hpp"
#include "dvfsim/processor_model.hpp"
#include "dvfsim/reclaim.hpp"
#include "dvfsim/schedule.hpp"
#include "dvfsim/task_graph.hpp"

namespace {

const dvfsim::ProcessorModel& transmeta() {
  static const dvfsim::ProcessorModel model = dvfsim::preset("transmeta_crusoe");
  return model;
}

void BM_GenRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto g = dvfsim::gen_random(n, seed++, 5, 10, 8, 0.2, 0.001, 0.005);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GenRandom)->Arg(100)->Arg(500);

void BM_ListSchedule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = dvfsim::gen_random(n, 7, 5, 10, 8, 0.2, 0.001, 0.005);
  for (auto _ : state) {
    auto s = dvfsim::list_schedule(g, 8, transmeta(), dvfsim::Priority::Lpt);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ListSchedule)->Arg(100)->Arg(500);

void BM_LpSolve(benchmark::State& state) {
  std::vector<double> freqs, powers;
  for (const auto& lv : transmeta().levels()) {
    freqs.push_back(lv.freq_mhz);
    powers.push_back(transmeta().dynamic_power(lv.freq_mhz));
  }
  const dvfsim::TaskLP lp(freqs, powers, 4002, 10);
  for (auto _ : state) {
    auto sol = dvfsim::solve(lp);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_LpSolve);

void BM_ReclaimSchedule(benchmark::State& state) {
  const auto g = dvfsim::gen_random(200, 7, 5, 10, 8, 0.2, 0.001, 0.005);
  const auto s = dvfsim::list_schedule(g, 8, transmeta(), dvfsim::Priority::Lpt);
  for (auto _ : state) {
    auto r = dvfsim::reclaim_schedule(s, g, transmeta(), dvfsim::Algorithm::Mfs);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_ReclaimSchedule);

}  // namespace

BENCHMARK_MAIN();
