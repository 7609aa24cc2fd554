#include "im2colsim/sweep.hpp"

#include <fmt/format.h>

#include <atomic>
#include <thread>

#include "im2colsim/error.hpp"

namespace im2colsim {

std::vector<SweepRow> sweep(const std::vector<NamedSpec>& specs,
                            const std::vector<ArchConfig>& arch_grid,
                            const std::vector<Method>& methods, int jobs) {
  if (arch_grid.empty() || methods.empty()) {
    fail(ErrorCode::Config, "sweep needs at least one architecture and one method");
  }
  std::vector<SweepRow> rows;
  rows.reserve(arch_grid.size() * specs.size() * methods.size());
  for (const ArchConfig& arch : arch_grid)
    for (const NamedSpec& s : specs)
      for (Method m : methods) rows.push_back({s.name, s.spec, arch, m, std::nullopt, {}, {}});

  auto run = [&rows](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      row.report = simulate_timing(row.spec, row.arch, row.method);
    } catch (const Error& e) {
      row.error = fmt::format("{}: {}", to_string(e.code()), e.what());
      row.error_code = e.code();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(rows.size(), static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

std::string sim_csv_header() {
  return "layer,batch,in_channels,in_height,in_width,out_channels,filter_height,filter_width,"
         "stride_h,stride_w,pad_h,pad_w,dilation_h,dilation_w,"
         "array_rows,array_cols,clock_mhz,word_elems,elem_bytes,sram_capacity_bytes,"
         "dram_bandwidth_gbps,dram_fixed_latency_cycles,max_multi_tile,method,"
         "total_cycles,compute_cycles,stall_cycles,weight_load_cycles,utilization,tflops,"
         "dram_read_bytes,dram_write_bytes,ofmap_write_bytes,sram_reads,sram_writes,"
         "sram_idle_ratio,tiles_per_pass,resident_sram_bytes,error";
}

std::string sim_csv_row(const SweepRow& row) {
  const ConvSpec& s = row.spec;
  const ArchConfig& a = row.arch;
  std::string out = fmt::format(
      "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.1f},{},{},{},{:.1f},{},{},{},", row.layer,
      s.batch, s.in_channels, s.in_height, s.in_width, s.out_channels, s.filter_height,
      s.filter_width, s.stride_h, s.stride_w, s.pad_h, s.pad_w, s.dilation_h, s.dilation_w,
      a.array_rows, a.array_cols, a.clock_mhz, a.word_elems, a.elem_bytes,
      a.sram_capacity_bytes, a.dram_bandwidth_gbps, a.dram_fixed_latency_cycles,
      a.max_multi_tile == 0 ? std::string("auto") : std::to_string(a.max_multi_tile),
      to_string(row.method));
  if (row.report) {
    const SimReport& r = *row.report;
    out += fmt::format("{},{},{},{},{:.6f},{:.6f},{},{},{},{},{},{:.6f},{},{},", r.total_cycles,
                       r.compute_cycles, r.stall_cycles, r.weight_load_cycles, r.pe_utilization,
                       r.tflops(a.clock_mhz), r.dram_bytes_read, r.dram_bytes_written,
                       r.ofmap_bytes_written, r.sram_reads, r.sram_writes, r.sram_idle_ratio,
                       r.tiles_per_pass, r.resident_sram_bytes);
  } else {
    out += ",,,,,,,,,,,,,,";
  }
  // Errors are single-line; keep commas and quotes out of the field.
  std::string err = row.error;
  for (char& c : err) {
    if (c == ',' || c == '"' || c == '\n') c = ';';
  }
  return out + err;
}

void write_sim_csv(std::ostream& os, std::string_view command, const std::vector<SweepRow>& rows) {
  os << "# " << kCsvVersion << ' ' << command << '\n' << sim_csv_header() << '\n';
  for (const SweepRow& row : rows) os << sim_csv_row(row) << '\n';
}

}  // namespace im2colsim
