#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "im2colsim/arch_config.hpp"
#include "im2colsim/conv_spec.hpp"
#include "im2colsim/error.hpp"
#include "im2colsim/simulator.hpp"

namespace im2colsim {

struct NamedSpec {
  std::string name;
  ConvSpec spec;
};

struct SweepRow {
  std::string layer;
  ConvSpec spec;
  ArchConfig arch;
  Method method = Method::ChannelFirstImplicit;
  std::optional<SimReport> report;
  std::string error;  // "E_CODE: message" when the run failed
  std::optional<ErrorCode> error_code;
};

/// Timing-only runs over arch x spec x method, in that nesting order. A failed
/// run leaves `report` empty and fills `error`; the sweep carries on.
/// `jobs` > 1 runs points on worker threads; row order does not change.
std::vector<SweepRow> sweep(const std::vector<NamedSpec>& specs,
                            const std::vector<ArchConfig>& arch_grid,
                            const std::vector<Method>& methods, int jobs = 1);

/// CSV schema version, written as the first line ("# im2colsim-csv v1 <command>").
inline constexpr std::string_view kCsvVersion = "im2colsim-csv v1";

std::string sim_csv_header();
std::string sim_csv_row(const SweepRow& row);
void write_sim_csv(std::ostream& os, std::string_view command, const std::vector<SweepRow>& rows);

}  // namespace im2colsim
