#pragma once

#include <cstdint>

namespace im2colsim {

/// Event timeline for a sequence of array passes.
///
/// A fill group is one on-chip buffer's worth of input; its DRAM fill may
/// start once the previous group starts streaming (double buffering) and the
/// DRAM is free. Each step inside a group loads its weights into a staging
/// buffer while the previous step streams, then streams `stream` rows.
/// Gaps between streams are charged to weight loading first, then to stalls.
class Timeline {
 public:
  struct Step {
    std::int64_t stream = 0;
    std::int64_t weight_load = 0;
    std::int64_t port_stall = 0;  // extra single-port cycles after the stream
  };

  void begin_group(std::int64_t fill_cycles);
  void add_step(const Step& step);
  /// DRAM write issued when the current step ends (e.g. OFMap band write-back).
  void write_back(std::int64_t cycles);
  /// DRAM-only phase the array waits on (e.g. explicit lowering); charged as stall.
  void dram_phase(std::int64_t cycles);

  struct Totals {
    std::int64_t total = 0;
    std::int64_t compute = 0;
    std::int64_t stall = 0;
    std::int64_t weight_load = 0;
    std::int64_t warmup = 0;  // stall before the first stream
    std::int64_t tail = 0;    // DRAM work left after the final drain
  };
  Totals finish(std::int64_t drain_cycles);

 private:
  std::int64_t now_ = 0;            // end of the last stream (incl. port stall)
  std::int64_t dram_free_ = 0;
  std::int64_t pending_wb_ = 0;     // write-back queued behind the next fill
  std::int64_t pending_wb_at_ = 0;
  std::int64_t fill_done_ = 0;
  std::int64_t group_start_ = 0;  // first stream start of the current group
  bool group_started_ = false;
  std::int64_t last_stream_start_ = 0;
  bool first_step_ = true;
  Totals totals_;
};

}  // namespace im2colsim
