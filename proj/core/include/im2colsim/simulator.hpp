#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "im2colsim/arch_config.hpp"
#include "im2colsim/conv_spec.hpp"
#include "im2colsim/lowering.hpp"
#include "im2colsim/tensor.hpp"

namespace im2colsim {

enum class Method { ChannelFirstImplicit, ChannelLastImplicit, ExplicitIm2col, PlainGemm };

std::string_view to_string(Method method);
/// Accepts the enum spelling, its short form ("ChannelFirst", "ChannelLast",
/// "Explicit", "Gemm") and lower-case variants.
std::optional<Method> parse_method(std::string_view text);
const std::vector<Method>& all_methods();

struct MultiTilePlan {
  int tiles_per_pass = 1;
  std::vector<std::vector<TileDescriptor>> passes;
  int duplication_factor = 1;
};

/// min(floor(R / C_I), W_F), further capped by arch.max_multi_tile when set.
/// Returns 1 when C_I > R (the channel-split path).
int multi_tile_count(const ConvSpec& spec, const ArchConfig& arch);
bool needs_channel_split(const ConvSpec& spec, const ArchConfig& arch);

/// Filter positions in row-major order, grouped tiles_per_pass at a time.
MultiTilePlan plan_multi_tile(const ConvSpec& spec, const ArchConfig& arch);

struct SimReport {
  std::int64_t total_cycles = 0;
  std::int64_t compute_cycles = 0;  // streaming plus the final drain
  std::int64_t stall_cycles = 0;
  std::int64_t weight_load_cycles = 0;  // exposed weight loading only
  std::int64_t warmup_cycles = 0;       // stall before the first stream
  std::int64_t tail_cycles = 0;         // DRAM write-back after the final drain
  std::int64_t lowering_cycles = 0;     // explicit lowering phase (part of stall)
  double pe_utilization = 0.0;
  std::int64_t dram_bytes_read = 0;
  /// Intermediate DRAM writes (the lowered matrix for ExplicitIm2col).
  std::int64_t dram_bytes_written = 0;
  std::int64_t ofmap_bytes_written = 0;  // final OFMap write-back
  std::int64_t sram_reads = 0;           // word accesses
  std::int64_t sram_writes = 0;
  double achieved_flops = 0.0;  // MACs per cycle
  std::int64_t useful_macs = 0;
  double sram_idle_ratio = 0.0;
  int tiles_per_pass = 1;
  int duplication_factor = 1;
  /// IFMap workspace allocated across vector memories for one pass buffer.
  std::int64_t resident_sram_bytes = 0;
  int bands = 0;
  std::int64_t passes = 0;  // array passes (one weight tile each)

  double tflops(double clock_mhz) const {
    return 2.0 * achieved_flops * clock_mhz * 1e6 / 1e12;
  }
};

struct SimResult {
  Tensor ofmap;  // NHWC, or M x N for GEMMs
  SimReport report;
};

struct SimOptions {
  /// Push every pass through the PE-grid model instead of the direct product.
  bool cycle_accurate = false;
};

/// Timing plus functional execution. `ifmap` and `filters` as for direct_conv.
SimResult simulate(const ConvSpec& spec, const ArchConfig& arch, Method method,
                   const Tensor& ifmap, const Tensor& filters, const SimOptions& options = {});

/// Timing only; no data is touched.
SimReport simulate_timing(const ConvSpec& spec, const ArchConfig& arch, Method method);

/// a (M x K) times b (K x N) on the array, operands already in DRAM.
SimResult simulate_gemm(const Tensor& a, const Tensor& b, const ArchConfig& arch,
                        const SimOptions& options = {});
SimReport simulate_gemm_timing(std::int64_t m, std::int64_t k, std::int64_t n,
                               const ArchConfig& arch);

}  // namespace im2colsim
