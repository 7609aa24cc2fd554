#include "im2colsim/arch_config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "im2colsim/error.hpp"
#include "json_util.hpp"

namespace im2colsim {

ArchConfig ArchConfig::with_array_size(int size) const {
  ArchConfig a = *this;
  a.array_rows = size;
  a.array_cols = size;
  a.num_vector_memories = size;
  return a;
}

void ArchConfig::validate() const {
  const auto positive = [](auto v, const char* name) {
    if (!(v > 0)) fail(ErrorCode::Config, fmt::format("{} must be > 0", name));
  };
  positive(array_rows, "array_rows");
  positive(array_cols, "array_cols");
  positive(clock_mhz, "clock_mhz");
  positive(num_vector_memories, "num_vector_memories");
  positive(word_elems, "word_elems");
  positive(elem_bytes, "elem_bytes");
  positive(sram_capacity_bytes, "sram_capacity_bytes");
  if (!dram_ideal) positive(dram_bandwidth_gbps, "dram_bandwidth_gbps");
  if (dram_fixed_latency_cycles < 0 || dram_burst_bytes < 0 || max_multi_tile < 0 ||
      addr_gen_overhead_cycles < 0) {
    fail(ErrorCode::Config, "latency, burst, multi-tile cap and overhead must be >= 0");
  }
  if (num_vector_memories != array_rows) {
    fail(ErrorCode::Config,
         fmt::format("num_vector_memories ({}) must equal array_rows ({})",
                     num_vector_memories, array_rows));
  }
}

ArchConfig parse_arch_config(const std::string& text, const std::string& origin) {
  const nlohmann::json doc = detail::parse_json(text, origin);
  if (!doc.is_object()) fail(ErrorCode::Parse, origin + ": arch config must be an object");
  ArchConfig a;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "array_rows") a.array_rows = value.get<int>();
      else if (key == "array_cols") a.array_cols = value.get<int>();
      else if (key == "clock_mhz") a.clock_mhz = value.get<double>();
      else if (key == "num_vector_memories") a.num_vector_memories = value.get<int>();
      else if (key == "word_elems") a.word_elems = value.get<int>();
      else if (key == "elem_bytes") a.elem_bytes = value.get<int>();
      else if (key == "sram_capacity_bytes") a.sram_capacity_bytes = value.get<std::int64_t>();
      else if (key == "dram_bandwidth_gbps") a.dram_bandwidth_gbps = value.get<double>();
      else if (key == "dram_fixed_latency_cycles") a.dram_fixed_latency_cycles = value.get<int>();
      else if (key == "dram_burst_bytes") a.dram_burst_bytes = value.get<int>();
      else if (key == "dram_ideal") a.dram_ideal = value.get<bool>();
      else if (key == "max_multi_tile") {
        a.max_multi_tile = value.is_string() && value.get<std::string>() == "auto"
                               ? 0
                               : value.get<int>();
      } else if (key == "addr_gen_overhead_cycles") {
        a.addr_gen_overhead_cycles = value.get<int>();
      } else {
        fail(ErrorCode::Config, fmt::format("{}: unknown arch key '{}'", origin, key));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, fmt::format("{}: {}", origin, e.what()));
  }
  // Unspecified vector-memory count follows the array height.
  if (!doc.contains("num_vector_memories")) a.num_vector_memories = a.array_rows;
  a.validate();
  return a;
}

ArchConfig load_arch_config(const std::filesystem::path& path) {
  return parse_arch_config(detail::read_file(path), path.string());
}

std::string to_json(const ArchConfig& a) {
  nlohmann::ordered_json j;
  j["array_rows"] = a.array_rows;
  j["array_cols"] = a.array_cols;
  j["clock_mhz"] = a.clock_mhz;
  j["num_vector_memories"] = a.num_vector_memories;
  j["word_elems"] = a.word_elems;
  j["elem_bytes"] = a.elem_bytes;
  j["sram_capacity_bytes"] = a.sram_capacity_bytes;
  j["dram_bandwidth_gbps"] = a.dram_bandwidth_gbps;
  j["dram_fixed_latency_cycles"] = a.dram_fixed_latency_cycles;
  j["dram_burst_bytes"] = a.dram_burst_bytes;
  j["dram_ideal"] = a.dram_ideal;
  if (a.max_multi_tile == 0) j["max_multi_tile"] = "auto";
  else j["max_multi_tile"] = a.max_multi_tile;
  j["addr_gen_overhead_cycles"] = a.addr_gen_overhead_cycles;
  return j.dump(2);
}

}  // namespace im2colsim
