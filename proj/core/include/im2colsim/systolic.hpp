#pragma once

#include <cstdint>

#include "im2colsim/tensor.hpp"

namespace im2colsim {

/// Weight-stationary systolic array. PE (r, c) holds weight W[r][c]; input
/// row r enters from the left one cycle after row r-1 and partial sums flow
/// down the columns.
class SystolicArray {
 public:
  SystolicArray(int rows, int cols) : rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  /// Cycles to shift a full weight tile in, one PE row per cycle.
  std::int64_t weight_load_cycles() const { return rows_; }
  /// Cycles after the last input enters until its last result leaves.
  std::int64_t drain_cycles() const { return rows_ + cols_ - 2; }

  struct Run {
    Tensor outputs;          // M x cols
    std::int64_t cycles = 0; // weight load + stream + drain
  };

  /// Steps every PE every cycle. `inputs` is M x k (k <= rows), `weights`
  /// is k x n (n <= cols); unused PEs hold zero weights.
  Run run_cycle_accurate(const Tensor& inputs, const Tensor& weights) const;

  /// Same arithmetic without the cycle loop: out += inputs * weights, each
  /// output accumulated top PE row first.
  static void accumulate(const Tensor& inputs, const Tensor& weights, Tensor& out);

 private:
  int rows_;
  int cols_;
};

}  // namespace im2colsim
