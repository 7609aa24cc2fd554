#include "im2colsim/kernels.hpp"

#include <fmt/format.h>

#include "im2colsim/error.hpp"

namespace im2colsim {
namespace {

void require_shape(const Tensor& t, Shape4 expected, const char* what) {
  if (t.is_matrix()) {
    fail(ErrorCode::Shape, fmt::format("{} must be rank 4", what));
  }
  const Shape4 got = t.shape();
  if (!(got == expected)) {
    fail(ErrorCode::Shape,
         fmt::format("{} shape n={} c={} h={} w={} does not match expected "
                     "n={} c={} h={} w={}",
                     what, got.n, got.c, got.h, got.w, expected.n, expected.c,
                     expected.h, expected.w));
  }
}

}  // namespace

Shape4 ifmap_shape(const ConvSpec& spec) {
  return {spec.batch, spec.in_channels, spec.in_height, spec.in_width};
}

Shape4 filter_shape(const ConvSpec& spec) {
  return {spec.out_channels, spec.in_channels, spec.filter_height,
          spec.filter_width};
}

Shape4 ofmap_shape(const ConvSpec& spec) {
  return {spec.batch, spec.out_channels, spec.out_height(), spec.out_width()};
}

Tensor direct_conv(const Tensor& ifmap, const Tensor& filters,
                   const ConvSpec& spec) {
  spec.validate();
  require_shape(ifmap, ifmap_shape(spec), "ifmap");
  require_shape(filters, filter_shape(spec), "filters");

  Tensor out = Tensor::zeros(Layout::NHWC, ofmap_shape(spec));
  const int ho_count = spec.out_height();
  const int wo_count = spec.out_width();
  for (int n = 0; n < spec.batch; ++n) {
    for (int ho = 0; ho < ho_count; ++ho) {
      for (int wo = 0; wo < wo_count; ++wo) {
        for (int co = 0; co < spec.out_channels; ++co) {
          float acc = 0.0f;
          for (int hf = 0; hf < spec.filter_height; ++hf) {
            const int h = ho * spec.stride_h + hf * spec.dilation_h - spec.pad_h;
            if (h < 0 || h >= spec.in_height) continue;
            for (int wf = 0; wf < spec.filter_width; ++wf) {
              const int w = wo * spec.stride_w + wf * spec.dilation_w - spec.pad_w;
              if (w < 0 || w >= spec.in_width) continue;
              for (int c = 0; c < spec.in_channels; ++c) {
                acc += ifmap.at(n, c, h, w) * filters.at(co, c, hf, wf);
              }
            }
          }
          out.at(n, co, ho, wo) = acc;
        }
      }
    }
  }
  return out;
}

Tensor gemm(const Tensor& a, const Tensor& b) {
  if (!a.is_matrix() || !b.is_matrix()) {
    fail(ErrorCode::Shape, "gemm operands must be row-major matrices");
  }
  if (a.cols() != b.rows()) {
    fail(ErrorCode::Shape, fmt::format("gemm inner dims differ: {}x{} * {}x{}",
                                       a.rows(), a.cols(), b.rows(), b.cols()));
  }
  Tensor c = Tensor::matrix(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      const float lhs = a.at(i, k);
      for (std::size_t j = 0; j < cols; ++j) c.at(i, j) += lhs * b.at(k, j);
    }
  }
  return c;
}

Tensor relayout(const Tensor& t, Layout target) {
  if (t.is_matrix() != (target == Layout::RowMajorMatrix)) {
    fail(ErrorCode::Shape,
         fmt::format("cannot relayout {} to {}: incompatible rank",
                     to_string(t.layout()), to_string(target)));
  }
  if (t.is_matrix()) return t;
  const Shape4 s = t.shape();
  Tensor out = Tensor::zeros(target, s);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int h = 0; h < s.h; ++h)
        for (int w = 0; w < s.w; ++w) out.at(n, c, h, w) = t.at(n, c, h, w);
  return out;
}

}  // namespace im2colsim
