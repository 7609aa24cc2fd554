#pragma once

#include <cstdint>
#include <vector>

#include "im2colsim/conv_spec.hpp"
#include "im2colsim/tensor.hpp"

namespace im2colsim {

/// Order of the H_F*W_F*C_I columns of a lowered matrix.
///   ChannelLast:  k = (c * H_F + h_f) * W_F + w_f
///   ChannelFirst: k = (h_f * W_F + w_f) * C_I + c
enum class ColumnOrdering { ChannelLast, ChannelFirst };

struct FilterTap {
  int h_f = 0;
  int w_f = 0;
  int c = 0;
  bool operator==(const FilterTap&) const = default;
};

std::int64_t column_index(const ConvSpec& spec, ColumnOrdering ord, FilterTap tap);
FilterTap column_tap(const ConvSpec& spec, ColumnOrdering ord, std::int64_t k);

struct Coord {
  int h = 0;
  int w = 0;
  bool operator==(const Coord&) const = default;
  auto operator<=>(const Coord&) const = default;
};

/// One decomposed 1x1 convolution: filter position <r, s>.
struct TileDescriptor {
  int r = 0;
  int s = 0;
  int stride_h = 1;
  int stride_w = 1;
  int dilation_h = 1;
  int dilation_w = 1;
  int pad_h = 0;
  int pad_w = 0;

  static TileDescriptor make(const ConvSpec& spec, int r, int s);

  /// IFMap coordinate read for output position (i, j); may lie in padding.
  Coord gather(int i, int j) const {
    return {i * stride_h + r * dilation_h - pad_h,
            j * stride_w + s * dilation_w - pad_w};
  }

  bool operator==(const TileDescriptor&) const = default;
};

bool in_bounds(const ConvSpec& spec, Coord p);

/// Lowered IFMap: (N*H_O*W_O) x (H_F*W_F*C_I); batch elements stacked along rows.
Tensor im2col_explicit(const Tensor& ifmap, const ConvSpec& spec, ColumnOrdering ord);

/// Filter matrix: (H_F*W_F*C_I) x C_O, rows in the same order as the lowered columns.
Tensor lower_filter(const Tensor& filters, const ConvSpec& spec, ColumnOrdering ord);

/// perm[k_cf] = k_cl.
std::vector<std::int64_t> column_permutation(const ConvSpec& spec);

/// Apply `perm` (CF index -> CL index) to the columns of a CF-ordered matrix.
Tensor permute_columns(const Tensor& m, const std::vector<std::int64_t>& perm);
/// Apply `perm` to the rows of a CF-ordered filter matrix.
Tensor permute_rows(const Tensor& m, const std::vector<std::int64_t>& perm);

/// All H_F*W_F tiles, row-major over filter positions.
std::vector<TileDescriptor> decompose_tiles(const ConvSpec& spec);

/// (N*H_O*W_O) x C_I matrix of values gathered by one tile (zeros in padding).
Tensor gather_tile(const Tensor& ifmap, const ConvSpec& spec, const TileDescriptor& tile);
/// C_I x C_O weights of filter position <r, s>.
Tensor filter_slice(const Tensor& filters, const ConvSpec& spec, int r, int s);

/// Sum of per-tile 1x1 convolutions, accumulated in `order`. Returns NHWC.
Tensor accumulate_tiles(const Tensor& ifmap, const Tensor& filters,
                        const ConvSpec& spec,
                        const std::vector<TileDescriptor>& order);

/// In-bounds IFMap coordinates touched by a tile, sorted.
std::vector<Coord> tile_coords(const TileDescriptor& tile, const ConvSpec& spec);

struct Overlap {
  std::int64_t shared = 0;
  std::int64_t combined = 0;
  double ratio() const {
    return combined == 0 ? 1.0
                         : static_cast<double>(shared) / static_cast<double>(combined);
  }
};

/// Jaccard overlap of the in-bounds coordinate sets of two tiles.
Overlap tile_overlap_counts(const TileDescriptor& a, const TileDescriptor& b,
                            const ConvSpec& spec);
double tile_overlap(const TileDescriptor& a, const TileDescriptor& b,
                    const ConvSpec& spec);

struct MemoryFootprint {
  std::int64_t original_bytes = 0;
  std::int64_t lowered_bytes = 0;
  double ratio = 0.0;
};

MemoryFootprint lowered_memory_footprint(const ConvSpec& spec, int elem_bytes = 2);

}  // namespace im2colsim
