#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "im2colsim/conv_spec.hpp"
#include "im2colsim/lowering.hpp"
#include "im2colsim/tensor.hpp"

namespace im2colsim {

/// Block-level channel-first im2col for dot-product GEMM engines. The GEMM
/// is M = N*H_O*W_O rows, K = H_F*W_F*C_I (channel-first order), Nc = C_O.

struct OutputBlock {
  std::int64_t m_begin = 0;
  std::int64_t m_end = 0;
  int n_begin = 0;
  int n_end = 0;
};

/// A contiguous range of channel-first K columns.
struct KSubtile {
  std::int64_t k_begin = 0;
  std::int64_t k_end = 0;
};

struct BlockPlan {
  ConvSpec spec;
  std::int64_t block_m = 1;
  int block_n = 1;
  int block_k = 1;
  std::vector<OutputBlock> blocks;
  std::vector<KSubtile> subtiles;
};

/// When block_k <= C_I every filter position gets its own ceil(C_I / block_k)
/// subtiles; otherwise K is cut into plain block_k chunks.
BlockPlan partition(const ConvSpec& spec, std::int64_t block_m, int block_n, int block_k);

enum class SubtileOrder { FilterMajor, ReuseAware };
std::string_view to_string(SubtileOrder order);

struct SubtileRef {
  std::size_t block = 0;
  std::size_t subtile = 0;
  bool operator==(const SubtileRef&) const = default;
};

/// FilterMajor: for each column block, every K subtile sweeps all row blocks.
/// ReuseAware: for each output block, all K subtiles back to back.
std::vector<SubtileRef> order_subtiles(const BlockPlan& plan, SubtileOrder order);

/// True when no output element is written by two blocks and every element is covered.
bool writers_disjoint(const BlockPlan& plan);

/// Runs the subtile GEMMs in `order` and returns the NHWC OFMap.
Tensor execute_blocked(const BlockPlan& plan, const std::vector<SubtileRef>& order,
                       const Tensor& ifmap, const Tensor& filters);

struct ReuseTraffic {
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t dram_bytes = 0;
  double hit_fraction() const {
    const std::int64_t total = hits + misses;
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
  }
};

/// LRU SRAM of `sram_budget_bytes` over the IFMap elements each subtile
/// gathers (rows of its block x its K columns, padding skipped). Each
/// column block streams the IFMap again.
ReuseTraffic reuse_traffic(const BlockPlan& plan, const std::vector<SubtileRef>& order,
                           std::int64_t sram_budget_bytes, int elem_bytes = 2);

/// Distinct in-bounds IFMap elements one subtile reads.
std::int64_t subtile_working_set(const BlockPlan& plan, const SubtileRef& ref);

std::string blocksched_csv_header();
std::string blocksched_csv_row(std::string_view layer, const BlockPlan& plan, SubtileOrder order,
                               std::int64_t budget, const ReuseTraffic& traffic);

}  // namespace im2colsim
