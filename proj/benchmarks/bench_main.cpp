#include <benchmark/benchmark.h>

#include <random>

#include "im2colsim/blocksched.hpp"
#include "im2colsim/lowering.hpp"
#include "im2colsim/memmodel.hpp"
#include "im2colsim/simulator.hpp"
#include "im2colsim/systolic.hpp"
#include "im2colsim/workload.hpp"

using namespace im2colsim;

namespace {

const ConvSpec kResnetLayer{8, 128, 56, 56, 128, 3, 3, 1, 1, 1, 1, 1, 1};

void BM_SimulateTiming(benchmark::State& state) {
  const Method method = all_methods().at(state.range(0));
  const ArchConfig arch;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_timing(kResnetLayer, arch, method));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_SimulateTiming)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_CycleAccurateArray(benchmark::State& state) {
  const auto size = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(-3, 3);
  Tensor in = Tensor::matrix(256, size);
  Tensor w = Tensor::matrix(size, size);
  for (float& v : in.data()) v = static_cast<float>(d(rng));
  for (float& v : w.data()) v = static_cast<float>(d(rng));
  const SystolicArray array(size, size);
  for (auto _ : state) benchmark::DoNotOptimize(array.run_cycle_accurate(in, w));
}
BENCHMARK(BM_CycleAccurateArray)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_DramFill(benchmark::State& state) {
  const ArchConfig arch;
  const auto coords = tile_coords(TileDescriptor::make(kResnetLayer, 1, 1), kResnetLayer);
  const auto layout = state.range(0) == 0 ? DramLayout::HWC : DramLayout::CHW;
  for (auto _ : state) benchmark::DoNotOptimize(dram_fill(coords, layout, kResnetLayer, arch));
}
BENCHMARK(BM_DramFill)->Arg(0)->Arg(1);

void BM_ReuseTraffic(benchmark::State& state) {
  const ConvSpec s{1, 8, 99, 99, 8, 3, 3, 2, 2, 0, 0, 1, 1};
  const BlockPlan plan = partition(s, s.out_width(), s.out_channels, s.in_channels);
  const auto order = order_subtiles(plan, static_cast<SubtileOrder>(state.range(0)));
  const std::int64_t budget = 4 * subtile_working_set(plan, {0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(reuse_traffic(plan, order, budget));
}
BENCHMARK(BM_ReuseTraffic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
