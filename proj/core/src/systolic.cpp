#include "im2colsim/systolic.hpp"

#include <fmt/format.h>

#include <vector>

#include "im2colsim/error.hpp"

namespace im2colsim {
namespace {

void check_operands(const Tensor& inputs, const Tensor& weights, int rows, int cols) {
  if (!inputs.is_matrix() || !weights.is_matrix()) {
    fail(ErrorCode::Shape, "systolic operands must be matrices");
  }
  if (inputs.cols() != weights.rows()) {
    fail(ErrorCode::Shape, fmt::format("inner dims differ: {} vs {}", inputs.cols(),
                                       weights.rows()));
  }
  if (rows > 0 && (static_cast<int>(weights.rows()) > rows ||
                   static_cast<int>(weights.cols()) > cols)) {
    fail(ErrorCode::Shape, fmt::format("weight tile {}x{} exceeds a {}x{} array",
                                       weights.rows(), weights.cols(), rows, cols));
  }
}

}  // namespace

SystolicArray::Run SystolicArray::run_cycle_accurate(const Tensor& inputs,
                                                     const Tensor& weights) const {
  check_operands(inputs, weights, rows_, cols_);
  const int m_rows = static_cast<int>(inputs.rows());
  const int k = static_cast<int>(weights.rows());
  const int n = static_cast<int>(weights.cols());

  std::vector<float> w(static_cast<std::size_t>(rows_) * cols_, 0.0f);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < n; ++c) w[r * cols_ + c] = weights.at(r, c);
  }

  // act[r][c]: input value held by PE (r, c); psum[r][c]: partial sum it emits.
  std::vector<float> act(w.size(), 0.0f), psum(w.size(), 0.0f);
  std::vector<float> next_act(w.size()), next_psum(w.size());

  Run run{Tensor::matrix(m_rows, n), weight_load_cycles()};
  if (m_rows == 0) return run;

  const std::int64_t stream_cycles = std::int64_t{m_rows} + drain_cycles();
  for (std::int64_t t = 0; t < stream_cycles; ++t) {
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        float a;
        if (c == 0) {
          // Row r sees input m = t - r.
          const std::int64_t m = t - r;
          a = (m >= 0 && m < m_rows && r < k) ? inputs.at(m, r) : 0.0f;
        } else {
          a = act[r * cols_ + c - 1];
        }
        const float above = r == 0 ? 0.0f : psum[(r - 1) * cols_ + c];
        next_act[r * cols_ + c] = a;
        next_psum[r * cols_ + c] = above + a * w[r * cols_ + c];
      }
    }
    act.swap(next_act);
    psum.swap(next_psum);
    // Bottom PE of column c finishes input m = t - (rows - 1) - c.
    for (int c = 0; c < n; ++c) {
      const std::int64_t m = t - (rows_ - 1) - c;
      if (m >= 0 && m < m_rows) run.outputs.at(m, c) = psum[(rows_ - 1) * cols_ + c];
    }
  }
  run.cycles += stream_cycles;
  return run;
}

void SystolicArray::accumulate(const Tensor& inputs, const Tensor& weights, Tensor& out) {
  check_operands(inputs, weights, 0, 0);
  if (out.rows() != inputs.rows() || out.cols() != weights.cols()) {
    fail(ErrorCode::Shape, "accumulator shape mismatch");
  }
  const std::size_t m = inputs.rows(), k = inputs.cols(), n = weights.cols();
  const float* x = inputs.data().data();
  const float* w = weights.data().data();
  float* y = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (std::size_t r = 0; r < k; ++r) acc += x[i * k + r] * w[r * n + j];
      y[i * n + j] += acc;
    }
  }
}

}  // namespace im2colsim
