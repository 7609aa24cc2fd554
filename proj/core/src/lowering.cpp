#include "im2colsim/lowering.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <iterator>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"

namespace im2colsim {
namespace {

void require_ifmap(const Tensor& ifmap, const ConvSpec& spec) {
  spec.validate();
  if (ifmap.is_matrix() || !(ifmap.shape() == ifmap_shape(spec))) {
    fail(ErrorCode::Shape, "ifmap shape does not match " + spec.to_string());
  }
}

void require_filters(const Tensor& filters, const ConvSpec& spec) {
  spec.validate();
  if (filters.is_matrix() || !(filters.shape() == filter_shape(spec))) {
    fail(ErrorCode::Shape, "filter shape does not match " + spec.to_string());
  }
}

// In-bounds indices gathered along one axis by a filter offset.
std::vector<int> axis_positions(int outputs, int stride, int offset, int extent) {
  std::vector<int> out;
  out.reserve(outputs);
  for (int i = 0; i < outputs; ++i) {
    const int p = i * stride + offset;
    if (p >= 0 && p < extent) out.push_back(p);
  }
  return out;
}

std::int64_t sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<std::int64_t>(common.size());
}

}  // namespace

std::int64_t column_index(const ConvSpec& spec, ColumnOrdering ord, FilterTap tap) {
  if (ord == ColumnOrdering::ChannelLast) {
    return (std::int64_t{tap.c} * spec.filter_height + tap.h_f) * spec.filter_width +
           tap.w_f;
  }
  return (std::int64_t{tap.h_f} * spec.filter_width + tap.w_f) * spec.in_channels +
         tap.c;
}

FilterTap column_tap(const ConvSpec& spec, ColumnOrdering ord, std::int64_t k) {
  FilterTap tap;
  if (ord == ColumnOrdering::ChannelLast) {
    tap.w_f = static_cast<int>(k % spec.filter_width);
    k /= spec.filter_width;
    tap.h_f = static_cast<int>(k % spec.filter_height);
    tap.c = static_cast<int>(k / spec.filter_height);
  } else {
    tap.c = static_cast<int>(k % spec.in_channels);
    k /= spec.in_channels;
    tap.w_f = static_cast<int>(k % spec.filter_width);
    tap.h_f = static_cast<int>(k / spec.filter_width);
  }
  return tap;
}

TileDescriptor TileDescriptor::make(const ConvSpec& spec, int r, int s) {
  return {r, s, spec.stride_h, spec.stride_w, spec.dilation_h, spec.dilation_w,
          spec.pad_h, spec.pad_w};
}

bool in_bounds(const ConvSpec& spec, Coord p) {
  return p.h >= 0 && p.h < spec.in_height && p.w >= 0 && p.w < spec.in_width;
}

Tensor im2col_explicit(const Tensor& ifmap, const ConvSpec& spec, ColumnOrdering ord) {
  require_ifmap(ifmap, spec);
  const int ho_count = spec.out_height();
  const int wo_count = spec.out_width();
  const std::int64_t k_count = spec.gemm_k();
  Tensor lowered = Tensor::matrix(spec.gemm_m(), k_count);
  for (std::int64_t k = 0; k < k_count; ++k) {
    const FilterTap tap = column_tap(spec, ord, k);
    const TileDescriptor tile = TileDescriptor::make(spec, tap.h_f, tap.w_f);
    std::size_t row = 0;
    for (int n = 0; n < spec.batch; ++n) {
      for (int i = 0; i < ho_count; ++i) {
        for (int j = 0; j < wo_count; ++j, ++row) {
          const Coord p = tile.gather(i, j);
          if (in_bounds(spec, p)) lowered.at(row, k) = ifmap.at(n, tap.c, p.h, p.w);
        }
      }
    }
  }
  return lowered;
}

Tensor lower_filter(const Tensor& filters, const ConvSpec& spec, ColumnOrdering ord) {
  require_filters(filters, spec);
  const std::int64_t k_count = spec.gemm_k();
  Tensor out = Tensor::matrix(k_count, spec.out_channels);
  for (std::int64_t k = 0; k < k_count; ++k) {
    const FilterTap tap = column_tap(spec, ord, k);
    for (int co = 0; co < spec.out_channels; ++co) {
      out.at(k, co) = filters.at(co, tap.c, tap.h_f, tap.w_f);
    }
  }
  return out;
}

std::vector<std::int64_t> column_permutation(const ConvSpec& spec) {
  const std::int64_t k_count = spec.gemm_k();
  std::vector<std::int64_t> perm(k_count);
  for (std::int64_t k = 0; k < k_count; ++k) {
    perm[k] = column_index(spec, ColumnOrdering::ChannelLast,
                           column_tap(spec, ColumnOrdering::ChannelFirst, k));
  }
  return perm;
}

Tensor permute_columns(const Tensor& m, const std::vector<std::int64_t>& perm) {
  if (m.cols() != perm.size()) {
    fail(ErrorCode::Shape, fmt::format("permutation of {} entries applied to {} columns",
                                       perm.size(), m.cols()));
  }
  Tensor out = Tensor::matrix(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = 0; k < perm.size(); ++k) out.at(r, perm[k]) = m.at(r, k);
  return out;
}

Tensor permute_rows(const Tensor& m, const std::vector<std::int64_t>& perm) {
  if (m.rows() != perm.size()) {
    fail(ErrorCode::Shape, fmt::format("permutation of {} entries applied to {} rows",
                                       perm.size(), m.rows()));
  }
  Tensor out = Tensor::matrix(m.rows(), m.cols());
  for (std::size_t k = 0; k < perm.size(); ++k)
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(perm[k], c) = m.at(k, c);
  return out;
}

std::vector<TileDescriptor> decompose_tiles(const ConvSpec& spec) {
  std::vector<TileDescriptor> tiles;
  tiles.reserve(spec.filter_positions());
  for (int r = 0; r < spec.filter_height; ++r)
    for (int s = 0; s < spec.filter_width; ++s)
      tiles.push_back(TileDescriptor::make(spec, r, s));
  return tiles;
}

Tensor gather_tile(const Tensor& ifmap, const ConvSpec& spec, const TileDescriptor& tile) {
  require_ifmap(ifmap, spec);
  const int ho_count = spec.out_height();
  const int wo_count = spec.out_width();
  Tensor out = Tensor::matrix(spec.gemm_m(), spec.in_channels);
  std::size_t row = 0;
  for (int n = 0; n < spec.batch; ++n) {
    for (int i = 0; i < ho_count; ++i) {
      for (int j = 0; j < wo_count; ++j, ++row) {
        const Coord p = tile.gather(i, j);
        if (!in_bounds(spec, p)) continue;
        for (int c = 0; c < spec.in_channels; ++c) out.at(row, c) = ifmap.at(n, c, p.h, p.w);
      }
    }
  }
  return out;
}

Tensor filter_slice(const Tensor& filters, const ConvSpec& spec, int r, int s) {
  require_filters(filters, spec);
  Tensor out = Tensor::matrix(spec.in_channels, spec.out_channels);
  for (int c = 0; c < spec.in_channels; ++c)
    for (int co = 0; co < spec.out_channels; ++co) out.at(c, co) = filters.at(co, c, r, s);
  return out;
}

Tensor accumulate_tiles(const Tensor& ifmap, const Tensor& filters, const ConvSpec& spec,
                        const std::vector<TileDescriptor>& order) {
  Tensor out = Tensor::zeros(Layout::NHWC, ofmap_shape(spec));
  const int ho_count = spec.out_height();
  const int wo_count = spec.out_width();
  for (const TileDescriptor& tile : order) {
    const Tensor partial =
        gemm(gather_tile(ifmap, spec, tile), filter_slice(filters, spec, tile.r, tile.s));
    std::size_t row = 0;
    for (int n = 0; n < spec.batch; ++n)
      for (int i = 0; i < ho_count; ++i)
        for (int j = 0; j < wo_count; ++j, ++row)
          for (int co = 0; co < spec.out_channels; ++co) out.at(n, co, i, j) += partial.at(row, co);
  }
  return out;
}

std::vector<Coord> tile_coords(const TileDescriptor& tile, const ConvSpec& spec) {
  const auto rows = axis_positions(spec.out_height(), tile.stride_h,
                                   tile.r * tile.dilation_h - tile.pad_h, spec.in_height);
  const auto cols = axis_positions(spec.out_width(), tile.stride_w,
                                   tile.s * tile.dilation_w - tile.pad_w, spec.in_width);
  std::vector<Coord> coords;
  coords.reserve(rows.size() * cols.size());
  for (int h : rows)
    for (int w : cols) coords.push_back({h, w});
  return coords;
}

Overlap tile_overlap_counts(const TileDescriptor& a, const TileDescriptor& b,
                            const ConvSpec& spec) {
  // Gather sets are Cartesian products of a row set and a column set.
  const int ho = spec.out_height();
  const int wo = spec.out_width();
  const auto rows_a = axis_positions(ho, a.stride_h, a.r * a.dilation_h - a.pad_h, spec.in_height);
  const auto rows_b = axis_positions(ho, b.stride_h, b.r * b.dilation_h - b.pad_h, spec.in_height);
  const auto cols_a = axis_positions(wo, a.stride_w, a.s * a.dilation_w - a.pad_w, spec.in_width);
  const auto cols_b = axis_positions(wo, b.stride_w, b.s * b.dilation_w - b.pad_w, spec.in_width);
  const std::int64_t size_a = std::int64_t(rows_a.size()) * std::int64_t(cols_a.size());
  const std::int64_t size_b = std::int64_t(rows_b.size()) * std::int64_t(cols_b.size());
  Overlap o;
  o.shared = sorted_intersection(rows_a, rows_b) * sorted_intersection(cols_a, cols_b);
  o.combined = size_a + size_b - o.shared;
  return o;
}

double tile_overlap(const TileDescriptor& a, const TileDescriptor& b, const ConvSpec& spec) {
  return tile_overlap_counts(a, b, spec).ratio();
}

MemoryFootprint lowered_memory_footprint(const ConvSpec& spec, int elem_bytes) {
  spec.validate();
  MemoryFootprint f;
  f.original_bytes = std::int64_t{spec.batch} * spec.in_channels * spec.in_height *
                     spec.in_width * elem_bytes;
  f.lowered_bytes = spec.gemm_m() * spec.gemm_k() * elem_bytes;
  f.ratio = static_cast<double>(f.lowered_bytes) / static_cast<double>(f.original_bytes);
  return f;
}

}  // namespace im2colsim
