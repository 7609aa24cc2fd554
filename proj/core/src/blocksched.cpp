#include "im2colsim/blocksched.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <list>
#include <unordered_map>
#include <unordered_set>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"

namespace im2colsim {
namespace {

struct Element {
  int n, h, w, c;
};

// Calls f(row m, column k, element) for every in-bounds element a subtile gathers.
template <typename F>
void for_each_gather(const BlockPlan& plan, const SubtileRef& ref, F&& f) {
  const ConvSpec& spec = plan.spec;
  const OutputBlock& b = plan.blocks.at(ref.block);
  const KSubtile& ks = plan.subtiles.at(ref.subtile);
  const std::int64_t per_image = spec.output_positions();
  const int wo = spec.out_width();
  for (std::int64_t m = b.m_begin; m < b.m_end; ++m) {
    const int n = static_cast<int>(m / per_image);
    const int i = static_cast<int>((m % per_image) / wo);
    const int j = static_cast<int>((m % per_image) % wo);
    for (std::int64_t k = ks.k_begin; k < ks.k_end; ++k) {
      const FilterTap tap = column_tap(spec, ColumnOrdering::ChannelFirst, k);
      const Coord p = TileDescriptor::make(spec, tap.h_f, tap.w_f).gather(i, j);
      if (in_bounds(spec, p)) f(m, k, Element{n, p.h, p.w, tap.c});
    }
  }
}

std::int64_t key_of(const ConvSpec& s, const Element& e) {
  return ((std::int64_t{e.n} * s.in_height + e.h) * s.in_width + e.w) * s.in_channels + e.c;
}

}  // namespace

BlockPlan partition(const ConvSpec& spec, std::int64_t block_m, int block_n, int block_k) {
  spec.validate();
  if (block_m < 1 || block_n < 1 || block_k < 1) {
    fail(ErrorCode::Shape, "block extents must be >= 1");
  }
  BlockPlan plan{spec, block_m, block_n, block_k, {}, {}};
  for (int n0 = 0; n0 < spec.out_channels; n0 += block_n) {
    for (std::int64_t m0 = 0; m0 < spec.gemm_m(); m0 += block_m) {
      plan.blocks.push_back({m0, std::min(spec.gemm_m(), m0 + block_m), n0,
                             std::min(spec.out_channels, n0 + block_n)});
    }
  }
  if (block_k <= spec.in_channels) {
    for (int pos = 0; pos < spec.filter_positions(); ++pos) {
      const std::int64_t base = std::int64_t{pos} * spec.in_channels;
      for (int c0 = 0; c0 < spec.in_channels; c0 += block_k) {
        plan.subtiles.push_back({base + c0, base + std::min(spec.in_channels, c0 + block_k)});
      }
    }
  } else {
    for (std::int64_t k0 = 0; k0 < spec.gemm_k(); k0 += block_k) {
      plan.subtiles.push_back({k0, std::min(spec.gemm_k(), k0 + block_k)});
    }
  }
  return plan;
}

std::string_view to_string(SubtileOrder order) {
  return order == SubtileOrder::FilterMajor ? "FilterMajor" : "ReuseAware";
}

std::vector<SubtileRef> order_subtiles(const BlockPlan& plan, SubtileOrder order) {
  // Blocks are stored column-block major, so one column block is a contiguous run.
  std::vector<std::pair<std::size_t, std::size_t>> column_runs;
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    if (b == 0 || plan.blocks[b].n_begin != plan.blocks[b - 1].n_begin) {
      column_runs.emplace_back(b, b);
    }
    column_runs.back().second = b + 1;
  }
  std::vector<SubtileRef> out;
  out.reserve(plan.blocks.size() * plan.subtiles.size());
  for (const auto& [first, last] : column_runs) {
    if (order == SubtileOrder::FilterMajor) {
      for (std::size_t k = 0; k < plan.subtiles.size(); ++k)
        for (std::size_t b = first; b < last; ++b) out.push_back({b, k});
    } else {
      for (std::size_t b = first; b < last; ++b)
        for (std::size_t k = 0; k < plan.subtiles.size(); ++k) out.push_back({b, k});
    }
  }
  return out;
}

bool writers_disjoint(const BlockPlan& plan) {
  const std::int64_t m = plan.spec.gemm_m();
  const int nc = plan.spec.out_channels;
  std::vector<int> writers(static_cast<std::size_t>(m) * nc, 0);
  for (const OutputBlock& b : plan.blocks)
    for (std::int64_t r = b.m_begin; r < b.m_end; ++r)
      for (int c = b.n_begin; c < b.n_end; ++c) ++writers[r * nc + c];
  return std::all_of(writers.begin(), writers.end(), [](int w) { return w == 1; });
}

Tensor execute_blocked(const BlockPlan& plan, const std::vector<SubtileRef>& order,
                       const Tensor& ifmap, const Tensor& filters) {
  const ConvSpec& spec = plan.spec;
  if (!(ifmap.shape() == ifmap_shape(spec)) || !(filters.shape() == filter_shape(spec))) {
    fail(ErrorCode::Shape, "tensors do not match the plan's layer");
  }
  const Tensor weights = lower_filter(filters, spec, ColumnOrdering::ChannelFirst);
  Tensor acc = Tensor::matrix(spec.gemm_m(), spec.out_channels);
  for (const SubtileRef& ref : order) {
    const OutputBlock& b = plan.blocks.at(ref.block);
    for_each_gather(plan, ref, [&](std::int64_t m, std::int64_t k, const Element& e) {
      const float x = ifmap.at(e.n, e.c, e.h, e.w);
      for (int c = b.n_begin; c < b.n_end; ++c) acc.at(m, c) += x * weights.at(k, c);
    });
  }
  Tensor out = Tensor::zeros(Layout::NHWC, ofmap_shape(spec));
  std::size_t row = 0;
  for (int n = 0; n < spec.batch; ++n)
    for (int i = 0; i < spec.out_height(); ++i)
      for (int j = 0; j < spec.out_width(); ++j, ++row)
        for (int c = 0; c < spec.out_channels; ++c) out.at(n, c, i, j) = acc.at(row, c);
  return out;
}

ReuseTraffic reuse_traffic(const BlockPlan& plan, const std::vector<SubtileRef>& order,
                           std::int64_t sram_budget_bytes, int elem_bytes) {
  const std::int64_t capacity = std::max<std::int64_t>(0, sram_budget_bytes) / elem_bytes;
  std::list<std::int64_t> lru;  // front = most recent
  std::unordered_map<std::int64_t, std::list<std::int64_t>::iterator> where;
  ReuseTraffic t;
  for (const SubtileRef& ref : order) {
    for_each_gather(plan, ref, [&](std::int64_t, std::int64_t, const Element& e) {
      const std::int64_t key = key_of(plan.spec, e);
      const auto it = where.find(key);
      if (it != where.end()) {
        ++t.hits;
        lru.splice(lru.begin(), lru, it->second);
        return;
      }
      ++t.misses;
      if (capacity == 0) return;
      if (static_cast<std::int64_t>(lru.size()) == capacity) {
        where.erase(lru.back());
        lru.pop_back();
      }
      lru.push_front(key);
      where[key] = lru.begin();
    });
  }
  t.dram_bytes = t.misses * elem_bytes;
  return t;
}

std::int64_t subtile_working_set(const BlockPlan& plan, const SubtileRef& ref) {
  std::unordered_set<std::int64_t> seen;
  for_each_gather(plan, ref, [&](std::int64_t, std::int64_t, const Element& e) {
    seen.insert(key_of(plan.spec, e));
  });
  return static_cast<std::int64_t>(seen.size());
}

std::string blocksched_csv_header() {
  return "layer,policy,block_m,block_n,block_k,sram_budget_bytes,dram_bytes,hit_fraction";
}

std::string blocksched_csv_row(std::string_view layer, const BlockPlan& plan, SubtileOrder order,
                               std::int64_t budget, const ReuseTraffic& traffic) {
  return fmt::format("{},{},{},{},{},{},{},{:.6f}", layer, to_string(order), plan.block_m,
                     plan.block_n, plan.block_k, budget, traffic.dram_bytes,
                     traffic.hit_fraction());
}

}  // namespace im2colsim
