#include "im2colsim/tensor.hpp"

#include <fmt/format.h>

#include <numeric>

#include "im2colsim/error.hpp"

namespace im2colsim {
namespace {

// Position of logical axis (n, c, h, w) inside the dims list.
struct AxisOrder {
  int n, c, h, w;
};

AxisOrder axis_order(Layout layout) {
  switch (layout) {
    case Layout::NCHW: return {0, 1, 2, 3};
    case Layout::NHWC: return {0, 3, 1, 2};
    case Layout::HWCN: return {3, 2, 0, 1};
    case Layout::RowMajorMatrix: break;
  }
  fail(ErrorCode::Shape, "row-major matrix has no rank-4 axis order");
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::NCHW: return "NCHW";
    case Layout::NHWC: return "NHWC";
    case Layout::HWCN: return "HWCN";
    case Layout::RowMajorMatrix: return "RowMajorMatrix";
  }
  return "?";
}

Tensor::Tensor(std::vector<std::size_t> dims, Layout layout,
               std::vector<float> data)
    : dims_(std::move(dims)), layout_(layout), data_(std::move(data)) {
  const std::size_t expected_rank = layout_ == Layout::RowMajorMatrix ? 2 : 4;
  if (dims_.size() != expected_rank) {
    fail(ErrorCode::Shape, fmt::format("{} tensor needs rank {}, got {}",
                                       to_string(layout_), expected_rank,
                                       dims_.size()));
  }
  const std::size_t count = std::accumulate(dims_.begin(), dims_.end(),
                                            std::size_t{1}, std::multiplies<>());
  if (count != data_.size()) {
    fail(ErrorCode::Shape, fmt::format("dims product {} != data length {}",
                                       count, data_.size()));
  }
  if (expected_rank == 4) {
    const AxisOrder order = axis_order(layout_);
    std::size_t physical[4];
    std::size_t stride = 1;
    for (int axis = 3; axis >= 0; --axis) {
      physical[axis] = stride;
      stride *= dims_[axis];
    }
    strides_[0] = physical[order.n];
    strides_[1] = physical[order.c];
    strides_[2] = physical[order.h];
    strides_[3] = physical[order.w];
  }
}

Tensor Tensor::zeros(Layout layout, Shape4 shape) {
  const AxisOrder order = axis_order(layout);
  std::vector<std::size_t> dims(4);
  dims[order.n] = shape.n;
  dims[order.c] = shape.c;
  dims[order.h] = shape.h;
  dims[order.w] = shape.w;
  return Tensor(std::move(dims), layout, std::vector<float>(shape.size(), 0.0f));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols) {
  return Tensor({rows, cols}, Layout::RowMajorMatrix,
                std::vector<float>(rows * cols, 0.0f));
}

void Tensor::require_rank4() const {
  if (layout_ == Layout::RowMajorMatrix) {
    fail(ErrorCode::Shape, "rank-4 access on a row-major matrix");
  }
}

Shape4 Tensor::shape() const {
  require_rank4();
  const AxisOrder order = axis_order(layout_);
  return {static_cast<int>(dims_[order.n]), static_cast<int>(dims_[order.c]),
          static_cast<int>(dims_[order.h]), static_cast<int>(dims_[order.w])};
}

std::size_t Tensor::offset(int n, int c, int h, int w) const {
  return n * strides_[0] + c * strides_[1] + h * strides_[2] + w * strides_[3];
}

std::size_t Tensor::rows() const {
  if (!is_matrix()) fail(ErrorCode::Shape, "rows() on a rank-4 tensor");
  return dims_[0];
}

std::size_t Tensor::cols() const {
  if (!is_matrix()) fail(ErrorCode::Shape, "cols() on a rank-4 tensor");
  return dims_[1];
}

}  // namespace im2colsim
