#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace im2colsim {

enum class Layout { NCHW, NHWC, HWCN, RowMajorMatrix };

std::string_view to_string(Layout layout);

/// Logical extents of a rank-4 tensor, independent of its linearization.
/// For filter tensors n is the output-channel count and c the input channels.
struct Shape4 {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t size() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  bool operator==(const Shape4&) const = default;
};

/// Dense float tensor. `dims()` lists extents in linearization order, so an
/// NHWC tensor has dims {N, H, W, C} and an HWCN tensor {H, W, C, N}.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> dims, Layout layout, std::vector<float> data);

  static Tensor zeros(Layout layout, Shape4 shape);
  static Tensor matrix(std::size_t rows, std::size_t cols);

  Layout layout() const { return layout_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool is_matrix() const { return layout_ == Layout::RowMajorMatrix; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  // Rank-4 access by logical coordinate.
  Shape4 shape() const;
  std::size_t offset(int n, int c, int h, int w) const;
  float& at(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  float at(int n, int c, int h, int w) const {
    return data_[offset(n, c, h, w)];
  }

  // Matrix access.
  std::size_t rows() const;
  std::size_t cols() const;
  float& at(std::size_t r, std::size_t c) { return data_[r * dims_[1] + c]; }
  float at(std::size_t r, std::size_t c) const {
    return data_[r * dims_[1] + c];
  }

  bool operator==(const Tensor&) const = default;

 private:
  void require_rank4() const;

  std::vector<std::size_t> dims_;
  Layout layout_ = Layout::RowMajorMatrix;
  std::vector<float> data_;
  std::size_t strides_[4] = {0, 0, 0, 0};  // logical n, c, h, w strides
};

}  // namespace im2colsim
