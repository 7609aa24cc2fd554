#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace im2colsim {

/// Systolic array, vector-memory and DRAM parameters. Defaults are the
/// TPU-v2-like core: 128x128 array at 700 MHz, 128 vector memories with
/// 8 x 4-byte words, 32 MiB of unified on-chip memory, 700 GB/s HBM.
struct ArchConfig {
  int array_rows = 128;
  int array_cols = 128;
  double clock_mhz = 700.0;
  int num_vector_memories = 128;
  int word_elems = 8;
  int elem_bytes = 4;
  std::int64_t sram_capacity_bytes = 256 * 1024;  // per vector memory
  double dram_bandwidth_gbps = 700.0;             // 1e9 bytes per second
  int dram_fixed_latency_cycles = 1;              // per contiguous run
  int dram_burst_bytes = 0;                       // 0: merge at element granularity
  bool dram_ideal = false;                        // zero-cost DRAM
  int max_multi_tile = 0;                         // 0: auto
  int addr_gen_overhead_cycles = 0;               // channel-last, per lowered column

  static ArchConfig table2() { return {}; }

  /// Same config with an R x R array and R vector memories.
  ArchConfig with_array_size(int size) const;

  double dram_bytes_per_cycle() const {
    return dram_bandwidth_gbps * 1e9 / (clock_mhz * 1e6);
  }
  std::int64_t word_bytes() const { return std::int64_t{word_elems} * elem_bytes; }

  /// Throws Error(Config) on non-positive sizes or num_vector_memories != array_rows.
  void validate() const;

  bool operator==(const ArchConfig&) const = default;
};

/// JSON text with keys named exactly as the fields above. Missing keys keep
/// their defaults; `max_multi_tile` also accepts "auto".
ArchConfig parse_arch_config(const std::string& text, const std::string& origin = "<string>");
ArchConfig load_arch_config(const std::filesystem::path& path);
std::string to_json(const ArchConfig& arch);

}  // namespace im2colsim
