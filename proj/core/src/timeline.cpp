#include "im2colsim/timeline.hpp"

#include <algorithm>

#include "im2colsim/error.hpp"

namespace im2colsim {

void Timeline::begin_group(std::int64_t fill_cycles) {
  // The buffer this fill lands in frees up once the current group starts streaming.
  const std::int64_t issue = std::max(dram_free_, group_started_ ? group_start_ : now_);
  fill_done_ = issue + fill_cycles;
  dram_free_ = fill_done_;
  if (pending_wb_ > 0) {
    dram_free_ = std::max(dram_free_, pending_wb_at_) + pending_wb_;
    pending_wb_ = 0;
  }
  group_started_ = false;
}

void Timeline::add_step(const Step& step) {
  const std::int64_t load_start = first_step_ ? 0 : last_stream_start_;
  const std::int64_t weights_ready = load_start + step.weight_load;
  const std::int64_t start = std::max({now_, weights_ready, fill_done_});

  const std::int64_t gap = start - now_;
  const std::int64_t weight_part = std::clamp(weights_ready - now_, std::int64_t{0}, gap);
  totals_.weight_load += weight_part;
  totals_.stall += gap - weight_part;
  if (first_step_) totals_.warmup = gap - weight_part;

  totals_.compute += step.stream;
  totals_.stall += step.port_stall;
  now_ = start + step.stream + step.port_stall;

  if (!group_started_) {
    group_start_ = start;
    group_started_ = true;
  }
  last_stream_start_ = start;
  first_step_ = false;
}

void Timeline::write_back(std::int64_t cycles) {
  pending_wb_ += cycles;
  pending_wb_at_ = now_;
}

void Timeline::dram_phase(std::int64_t cycles) {
  const std::int64_t start = std::max(now_, dram_free_);
  const std::int64_t end = start + cycles;
  totals_.stall += end - now_;
  now_ = end;
  dram_free_ = end;
}

Timeline::Totals Timeline::finish(std::int64_t drain_cycles) {
  std::int64_t end = now_ + drain_cycles;
  totals_.compute += drain_cycles;
  if (pending_wb_ > 0) {
    dram_free_ = std::max(dram_free_, pending_wb_at_) + pending_wb_;
    pending_wb_ = 0;
  }
  if (dram_free_ > end) {
    totals_.tail = dram_free_ - end;
    totals_.stall += totals_.tail;
    end = dram_free_;
  }
  totals_.total = end;
  if (totals_.total != totals_.compute + totals_.stall + totals_.weight_load) {
    fail(ErrorCode::Internal, "timeline cycle accounting does not add up");
  }
  return totals_;
}

}  // namespace im2colsim
