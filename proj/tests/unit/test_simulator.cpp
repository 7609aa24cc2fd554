#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"
#include "im2colsim/memmodel.hpp"
#include "im2colsim/simulator.hpp"
#include "im2colsim/workload.hpp"
#include "oracles.hpp"

using namespace im2colsim;

namespace {

ArchConfig small_arch(int size, int word, std::int64_t capacity = 256 * 1024) {
  ArchConfig a = ArchConfig{}.with_array_size(size);
  a.word_elems = word;
  a.sram_capacity_bytes = capacity;
  return a;
}

}  // namespace

TEST(MultiTile, SelectionRule) {
  ArchConfig arch;
  EXPECT_EQ(multi_tile_count({8, 8, 128, 128, 128, 3, 3, 1, 1, 1, 1, 1, 1}, arch), 3);
  EXPECT_EQ(multi_tile_count({8, 128, 28, 28, 128, 3, 3, 1, 1, 1, 1, 1, 1}, arch), 1);
  EXPECT_EQ(multi_tile_count({8, 128, 28, 28, 128, 5, 5, 1, 1, 1, 1, 1, 1}, arch), 1);
  EXPECT_EQ(multi_tile_count({2, 2, 5, 5, 3, 3, 3, 1, 1, 0, 0, 1, 1}, small_arch(4, 2)), 2);
  EXPECT_EQ(multi_tile_count({1, 3, 9, 9, 1, 7, 7, 1, 1, 0, 0, 1, 1}, arch), 7);
  arch.max_multi_tile = 2;
  EXPECT_EQ(multi_tile_count({8, 8, 128, 128, 128, 3, 3, 1, 1, 1, 1, 1, 1}, arch), 2);
  ConvSpec wide{1, 300, 4, 4, 1, 3, 3, 1, 1, 1, 1, 1, 1};
  EXPECT_TRUE(needs_channel_split(wide, arch));
  EXPECT_EQ(multi_tile_count(wide, arch), 1);
}

TEST(MultiTile, PlanCoversEveryTileOnce) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    const ConvSpec s = random_spec(rng);
    const ArchConfig arch = small_arch(16, 4);
    const MultiTilePlan plan = plan_multi_tile(s, arch);
    std::multiset<std::pair<int, int>> seen;
    for (const auto& pass : plan.passes) {
      EXPECT_LE(static_cast<int>(pass.size()), plan.tiles_per_pass);
      for (const auto& t : pass) seen.insert({t.r, t.s});
    }
    EXPECT_EQ(static_cast<int>(seen.size()), s.filter_positions());
    EXPECT_EQ((std::set<std::pair<int, int>>(seen.begin(), seen.end()).size()), seen.size());
    EXPECT_LE(plan.tiles_per_pass, s.filter_positions());
    if (!needs_channel_split(s, arch)) EXPECT_LE(plan.tiles_per_pass * s.in_channels, 16);
    EXPECT_EQ(plan.duplication_factor, plan.tiles_per_pass);
  }
}

TEST(Simulate, SmallArrayWordTwo) {
  const ConvSpec s{2, 4, 5, 5, 3, 3, 3, 1, 1, 0, 0, 1, 1};
  const ArchConfig arch = small_arch(4, 2);
  std::mt19937_64 rng(8);
  const Tensor x = random_ifmap(s, rng);
  const Tensor f = random_filters(s, rng);
  const SimResult res = simulate(s, arch, Method::ChannelFirstImplicit, x, f);
  EXPECT_EQ(oracle::raw_nchw(res.ofmap), oracle::conv(oracle::raw_nchw(x), oracle::raw_nchw(f), s));
  EXPECT_EQ(res.report.tiles_per_pass, 1);
  EXPECT_EQ(res.report.passes, 9);
  // Every pass reads 9 words from each of the 4 vector memories.
  EXPECT_EQ(words_per_array(s, TileDescriptor::make(s, 1, 1), 0, 3, 1), 9);
  const std::int64_t ofmap_words = 3 * 9;
  EXPECT_EQ(res.report.sram_reads, 9 * 4 * 9 + ofmap_words);
}

TEST(Simulate, AllMethodsMatchOracle) {
  std::mt19937_64 rng(17);
  const std::vector<ArchConfig> archs{small_arch(16, 4), small_arch(8, 2, 2048), ArchConfig{}};
  for (int it = 0; it < 60; ++it) {
    const ConvSpec s = random_spec(rng);
    const Tensor x = random_ifmap(s, rng);
    const Tensor f = random_filters(s, rng);
    const auto ref = oracle::conv(oracle::raw_nchw(x), oracle::raw_nchw(f), s);
    const ArchConfig& arch = archs[it % archs.size()];
    for (Method m : all_methods()) {
      const SimResult res = simulate(s, arch, m, x, f);
      ASSERT_EQ(oracle::raw_nchw(res.ofmap), ref) << s.to_string() << " " << to_string(m);
      EXPECT_EQ(res.report.useful_macs, s.macs());
      EXPECT_LE(res.report.pe_utilization, 1.0);
      EXPECT_EQ(res.report.total_cycles, res.report.compute_cycles + res.report.stall_cycles +
                                             res.report.weight_load_cycles);
    }
  }
}

TEST(Simulate, CycleAccurateArrayAgrees) {
  std::mt19937_64 rng(19);
  RandomSpecBounds b;
  b.max_in_size = 7;
  b.in_channels = {1, 2, 3};
  b.max_batch = 3;
  b.max_out_channels = 6;
  for (int it = 0; it < 6; ++it) {
    const ConvSpec s = random_spec(rng, b);
    const Tensor x = random_ifmap(s, rng);
    const Tensor f = random_filters(s, rng);
    const ArchConfig arch = small_arch(4, 2);
    for (Method m : all_methods()) {
      EXPECT_EQ(simulate(s, arch, m, x, f, {true}).ofmap, simulate(s, arch, m, x, f).ofmap);
    }
  }
}

TEST(Simulate, TimingOnlyMatchesFunctionalReport) {
  const ConvSpec s{3, 5, 9, 8, 7, 3, 2, 2, 1, 1, 0, 1, 2};
  const ArchConfig arch = small_arch(8, 2, 1024);
  std::mt19937_64 rng(4);
  const Tensor x = random_ifmap(s, rng);
  const Tensor f = random_filters(s, rng);
  for (Method m : all_methods()) {
    const SimReport a = simulate(s, arch, m, x, f).report;
    const SimReport b = simulate_timing(s, arch, m);
    EXPECT_EQ(a.total_cycles, b.total_cycles);
    EXPECT_EQ(a.sram_reads, b.sram_reads);
    EXPECT_EQ(a.dram_bytes_read, b.dram_bytes_read);
  }
}

TEST(Simulate, SramReadsMatchAddressTrace) {
  // Analytic read counts equal what the address generator actually issues.
  const ConvSpec s{5, 3, 7, 6, 4, 3, 3, 2, 1, 1, 1, 1, 1};
  const ArchConfig arch = small_arch(8, 2);
  const Tensor x = Tensor::zeros(Layout::NCHW, ifmap_shape(s));
  std::int64_t traced = 0;
  for (const auto& pass : plan_multi_tile(s, arch).passes) {
    PackRegion region{pass};
    const auto img = pack_hwcn(x, s, arch, region);
    traced += address_schedule(img, s, arch, region).reads();
  }
  const SimReport r = simulate_timing(s, arch, Method::ChannelFirstImplicit);
  const std::int64_t ofmap_words = std::int64_t{s.out_channels} * s.output_positions() * 3;
  EXPECT_EQ(r.sram_reads, traced + ofmap_words);
}

TEST(Simulate, MultiTileIsFunctionallyNeutral) {
  const ConvSpec s{4, 4, 10, 10, 5, 3, 3, 1, 1, 1, 1, 1, 1};
  std::mt19937_64 rng(6);
  const Tensor x = random_ifmap(s, rng);
  const Tensor f = random_filters(s, rng);
  ArchConfig one = small_arch(16, 4);
  one.max_multi_tile = 1;
  const ArchConfig many = small_arch(16, 4);
  const SimResult a = simulate(s, one, Method::ChannelFirstImplicit, x, f);
  const SimResult b = simulate(s, many, Method::ChannelFirstImplicit, x, f);
  EXPECT_EQ(a.ofmap, b.ofmap);
  EXPECT_EQ(a.report.tiles_per_pass, 1);
  EXPECT_EQ(b.report.tiles_per_pass, 3);
  EXPECT_EQ(b.report.resident_sram_bytes, 3 * a.report.resident_sram_bytes);
  EXPECT_LT(b.report.total_cycles, a.report.total_cycles);
}

TEST(Simulate, ExplicitWritesLoweredMatrix) {
  std::mt19937_64 rng(10);
  for (int it = 0; it < 10; ++it) {
    const ConvSpec s = random_spec(rng);
    const ArchConfig arch = small_arch(16, 4);
    const SimReport r = simulate_timing(s, arch, Method::ExplicitIm2col);
    EXPECT_EQ(r.dram_bytes_written, lowered_memory_footprint(s, arch.elem_bytes).lowered_bytes);
    EXPECT_GT(r.lowering_cycles, 0);
    EXPECT_EQ(simulate_timing(s, arch, Method::ChannelFirstImplicit).dram_bytes_written, 0);
  }
}

TEST(Simulate, StallFreeWhenFillsFitUnderStreams) {
  // Fast DRAM: every pass fill is far shorter than its stream, so the only
  // stalls are the first fill (often hidden behind the weight load) and the
  // final write-back.
  ArchConfig arch;
  arch.dram_bandwidth_gbps = 7000.0;
  for (int c : {32, 64, 128}) {
    const ConvSpec s{8, c, 28, 28, c, 3, 3, 1, 1, 1, 1, 1, 1};
    const SimReport r = simulate_timing(s, arch, Method::ChannelFirstImplicit);
    EXPECT_EQ(r.stall_cycles, r.warmup_cycles + r.tail_cycles) << c;
  }
}

TEST(Simulate, OnePointConvEqualsPlainGemm) {
  const ConvSpec s{8, 128, 14, 14, 128, 1, 1, 1, 1, 0, 0, 1, 1};
  const ArchConfig arch;
  const SimReport conv = simulate_timing(s, arch, Method::ChannelFirstImplicit);
  const SimReport gemm = simulate_gemm_timing(s.gemm_m(), s.gemm_k(), s.out_channels, arch);
  EXPECT_EQ(conv.total_cycles, gemm.total_cycles);
  EXPECT_DOUBLE_EQ(conv.pe_utilization, gemm.pe_utilization);
}

TEST(Simulate, StrideHurtsChannelLastMore) {
  const ArchConfig arch;
  for (int c : {64, 128}) {
    const ConvSpec base{8, c, 56, 56, c, 3, 3, 1, 1, 1, 1, 1, 1};
    const double cf1 = simulate_timing(base, arch, Method::ChannelFirstImplicit).achieved_flops;
    const double cl1 = simulate_timing(base, arch, Method::ChannelLastImplicit).achieved_flops;
    for (int stride : {2, 4}) {
      ConvSpec s = base;
      s.stride_h = s.stride_w = stride;
      const double cf = simulate_timing(s, arch, Method::ChannelFirstImplicit).achieved_flops;
      const double cl = simulate_timing(s, arch, Method::ChannelLastImplicit).achieved_flops;
      EXPECT_GE(cf / cf1, cl / cl1) << c << " stride " << stride;
    }
  }
}

TEST(Simulate, AddressGenerationOverheadSlowsChannelLast) {
  const ConvSpec s{8, 64, 28, 28, 64, 3, 3, 2, 2, 1, 1, 1, 1};
  ArchConfig arch;
  const auto base = simulate_timing(s, arch, Method::ChannelLastImplicit).total_cycles;
  arch.addr_gen_overhead_cycles = 20;
  EXPECT_GT(simulate_timing(s, arch, Method::ChannelLastImplicit).total_cycles, base);
}

TEST(Simulate, NarrowWordsStallOnPorts) {
  // Ideal DRAM isolates the single-port contention between reads and fills.
  const ConvSpec s{8, 64, 28, 28, 64, 3, 3, 1, 1, 1, 1, 1, 1};
  ArchConfig arch;
  arch.dram_ideal = true;
  std::vector<std::int64_t> stalls;
  for (int w : {1, 2, 8}) {
    arch.word_elems = w;
    stalls.push_back(simulate_timing(s, arch, Method::ChannelFirstImplicit).stall_cycles);
  }
  EXPECT_GT(stalls[0], stalls[1]);
  EXPECT_GT(stalls[1], 0);
  EXPECT_EQ(stalls[2], 0);
}

TEST(Simulate, CapacityErrorWhenOneRowDoesNotFit) {
  // The GEMM methods can always shrink their M band, so only the implicit
  // methods need a whole output row resident.
  const ConvSpec s{8, 8, 64, 64, 8, 3, 3, 1, 1, 1, 1, 1, 1};
  ArchConfig arch = small_arch(16, 4, 64);
  for (Method m : {Method::ChannelFirstImplicit, Method::ChannelLastImplicit}) {
    try {
      simulate_timing(s, arch, m);
      FAIL() << to_string(m);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Capacity);
    }
  }
}

TEST(Simulate, ColumnTilingAndChannelSplit) {
  const ConvSpec s{2, 20, 6, 6, 19, 3, 3, 1, 1, 1, 1, 1, 1};
  const ArchConfig arch = small_arch(8, 2);
  std::mt19937_64 rng(9);
  const Tensor x = random_ifmap(s, rng);
  const Tensor f = random_filters(s, rng);
  const SimResult r = simulate(s, arch, Method::ChannelFirstImplicit, x, f);
  EXPECT_EQ(oracle::raw_nchw(r.ofmap), oracle::conv(oracle::raw_nchw(x), oracle::raw_nchw(f), s));
  // ceil(20/8) channel groups x 9 filter positions x ceil(19/8) column tiles.
  EXPECT_EQ(r.report.passes, 3 * 9 * 3);
}

TEST(Method, ParseNames) {
  EXPECT_EQ(parse_method("ChannelFirstImplicit"), Method::ChannelFirstImplicit);
  EXPECT_EQ(parse_method("channel_last"), Method::ChannelLastImplicit);
  EXPECT_EQ(parse_method("explicit"), Method::ExplicitIm2col);
  EXPECT_EQ(parse_method("PlainGemm"), Method::PlainGemm);
  EXPECT_FALSE(parse_method("winograd"));
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
}
