#include <gtest/gtest.h>

#include <random>

#include "im2colsim/error.hpp"
#include "im2colsim/simulator.hpp"
#include "im2colsim/systolic.hpp"
#include "im2colsim/timeline.hpp"

using namespace im2colsim;

namespace {

Tensor random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Tensor t = Tensor::matrix(r, c);
  std::uniform_int_distribution<int> d(-5, 5);
  for (float& x : t.data()) x = static_cast<float>(d(rng));
  return t;
}

}  // namespace

TEST(SystolicArray, CycleAccurateMatchesProduct) {
  std::mt19937_64 rng(1);
  for (auto [rows, cols, m, k, n] : std::vector<std::array<int, 5>>{
           {4, 4, 9, 4, 3}, {8, 4, 5, 6, 4}, {3, 7, 12, 3, 7}, {16, 16, 1, 16, 16}}) {
    SystolicArray array(rows, cols);
    const Tensor a = random_matrix(m, k, rng);
    const Tensor w = random_matrix(k, n, rng);
    const auto run = array.run_cycle_accurate(a, w);
    Tensor expect = Tensor::matrix(m, n);
    SystolicArray::accumulate(a, w, expect);
    EXPECT_EQ(run.outputs, expect);
    EXPECT_EQ(run.cycles, rows + m + rows + cols - 2);
  }
}

TEST(SystolicArray, SingleFullPassIs510Cycles) {
  std::mt19937_64 rng(2);
  SystolicArray array(128, 128);
  const Tensor a = random_matrix(128, 128, rng);
  const Tensor w = random_matrix(128, 128, rng);
  EXPECT_EQ(array.run_cycle_accurate(a, w).cycles, 510);
}

TEST(SystolicArray, RejectsOversizedWeights) {
  SystolicArray array(2, 2);
  EXPECT_THROW(array.run_cycle_accurate(Tensor::matrix(1, 3), Tensor::matrix(3, 1)), Error);
}

TEST(Timeline, SinglePass) {
  Timeline t;
  t.begin_group(0);
  t.add_step({128, 128, 0});
  const auto totals = t.finish(254);
  EXPECT_EQ(totals.total, 510);
  EXPECT_EQ(totals.weight_load, 128);
  EXPECT_EQ(totals.compute, 128 + 254);
  EXPECT_EQ(totals.stall, 0);
}

TEST(Timeline, WeightLoadHiddenBehindLongStreams) {
  Timeline t;
  t.begin_group(0);
  for (int i = 0; i < 4; ++i) t.add_step({200, 128, 0});
  const auto totals = t.finish(10);
  EXPECT_EQ(totals.weight_load, 128);  // only the first load is exposed
  EXPECT_EQ(totals.total, 128 + 4 * 200 + 10);
}

TEST(Timeline, ShortStreamsExposeWeightLoad) {
  Timeline t;
  t.begin_group(0);
  for (int i = 0; i < 3; ++i) t.add_step({50, 128, 0});
  const auto totals = t.finish(0);
  EXPECT_EQ(totals.weight_load, 128 + 2 * (128 - 50));
  EXPECT_EQ(totals.total, totals.compute + totals.stall + totals.weight_load);
}

TEST(Timeline, FillOverlapsPreviousGroup) {
  Timeline t;
  t.begin_group(300);  // first fill is exposed beyond the weight load
  t.add_step({1000, 128, 0});
  t.begin_group(900);  // fits under the first group's stream
  t.add_step({1000, 128, 0});
  t.begin_group(1500);  // does not fit: 500 cycles of stall
  t.add_step({1000, 128, 0});
  const auto totals = t.finish(0);
  EXPECT_EQ(totals.warmup, 300 - 128);
  EXPECT_EQ(totals.weight_load, 128);
  EXPECT_EQ(totals.stall, (300 - 128) + 500);
  EXPECT_EQ(totals.total, 300 + 3000 + 500);
}

TEST(Timeline, WriteBackTailAndDramPhase) {
  Timeline t;
  t.dram_phase(100);
  t.begin_group(0);
  t.add_step({50, 10, 0});
  t.write_back(500);
  const auto totals = t.finish(20);
  EXPECT_EQ(totals.tail, 100 + 50 + 500 - (100 + 50 + 20));
  EXPECT_EQ(totals.total, 650);
  EXPECT_EQ(totals.total, totals.compute + totals.stall + totals.weight_load);
}

TEST(PlainGemm, IdealDramSinglePass) {
  ArchConfig arch;
  arch.dram_ideal = true;
  const SimReport r = simulate_gemm_timing(128, 128, 128, arch);
  EXPECT_EQ(r.weight_load_cycles, 128);
  EXPECT_EQ(r.compute_cycles, 128 + 254);
  EXPECT_EQ(r.stall_cycles, 0);
  EXPECT_EQ(r.total_cycles, 510);
  EXPECT_DOUBLE_EQ(r.pe_utilization, 128.0 * 128 * 128 / (510.0 * 128 * 128));
}

TEST(PlainGemm, FunctionalMatchesProduct) {
  std::mt19937_64 rng(5);
  ArchConfig arch = ArchConfig{}.with_array_size(8);
  arch.word_elems = 2;
  arch.sram_capacity_bytes = 64;  // forces several row bands
  const Tensor a = random_matrix(37, 19, rng);
  const Tensor b = random_matrix(19, 21, rng);
  Tensor expect = Tensor::matrix(37, 21);
  SystolicArray::accumulate(a, b, expect);
  const SimResult res = simulate_gemm(a, b, arch);
  EXPECT_EQ(res.ofmap, expect);
  EXPECT_GT(res.report.bands, 1);
  EXPECT_EQ(simulate_gemm(a, b, arch, {true}).ofmap, expect);
}
