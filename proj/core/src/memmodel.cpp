#include "im2colsim/memmodel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "im2colsim/error.hpp"

namespace im2colsim {
namespace {

struct Interval {
  std::int64_t begin = 0;
  std::int64_t end = 0;  // exclusive
};

std::vector<Interval> merge_intervals(std::vector<Interval> v, std::int64_t burst) {
  if (burst > 0) {
    for (Interval& iv : v) {
      iv.begin = iv.begin / burst * burst;
      iv.end = (iv.end + burst - 1) / burst * burst;
    }
  }
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  std::vector<Interval> merged;
  for (const Interval& iv : v) {
    if (!merged.empty() && iv.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::int64_t run_cost(std::int64_t bytes, const ArchConfig& arch) {
  if (arch.dram_ideal) return 0;
  const double bpc = arch.dram_bytes_per_cycle();
  const auto transfer = static_cast<std::int64_t>(std::ceil(bytes / bpc - 1e-9));
  return arch.dram_fixed_latency_cycles + transfer;
}

// Output positions (i, j) of an output-row band, row-major.
std::vector<std::pair<int, int>> band_positions(const ConvSpec& spec, int row_begin,
                                                int row_end) {
  std::vector<std::pair<int, int>> out;
  const int wo = spec.out_width();
  out.reserve(static_cast<std::size_t>(row_end - row_begin) * wo);
  for (int i = row_begin; i < row_end; ++i)
    for (int j = 0; j < wo; ++j) out.emplace_back(i, j);
  return out;
}

int resolve_end(int end, int full) { return end < 0 ? full : end; }

}  // namespace

// ---------------------------------------------------------------------------

std::optional<int> VectorMemoryImage::array_of(int channel, int copy) const {
  const auto it = array_of_.find({channel, copy});
  if (it == array_of_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> VectorMemoryImage::word(int array, std::int64_t address) const {
  const auto& store = arrays_.at(array);
  const std::size_t at = static_cast<std::size_t>(address) * word_elems_;
  if (at + word_elems_ > store.size()) {
    fail(ErrorCode::Internal, fmt::format("word address {} out of range in array {}",
                                          address, array));
  }
  return std::span<const float>(store).subspan(at, word_elems_);
}

std::optional<std::int64_t> VectorMemoryImage::address_of(int copy, int group,
                                                          Coord p) const {
  const auto& index = copy_index_.at(copy);
  const auto it = index.find(p);
  if (it == index.end()) return std::nullopt;
  return std::int64_t{group} * static_cast<std::int64_t>(copy_coords_[copy].size()) +
         it->second;
}

std::span<const float> VectorMemoryImage::word_at(int array, Coord p, int group) const {
  const auto slot = occupancy_.at(array);
  if (!slot) fail(ErrorCode::Internal, fmt::format("array {} is empty", array));
  const auto addr = address_of(slot->copy, group, p);
  if (!addr) {
    fail(ErrorCode::Internal, fmt::format("({}, {}) not resident in array {}", p.h, p.w, array));
  }
  return word(array, *addr);
}

const TileDescriptor* VectorMemoryImage::copy_tile(int copy) const {
  if (tiles_.empty()) return nullptr;
  return &tiles_.at(copy);
}

std::int64_t VectorMemoryImage::resident_bytes() const {
  std::int64_t total = 0;
  for (const auto& a : arrays_) total += static_cast<std::int64_t>(a.size());
  return total * elem_bytes_;
}

std::int64_t words_per_array(const ConvSpec& spec, const TileDescriptor& tile,
                             int row_begin, int row_end, int groups) {
  std::int64_t rows = 0;
  for (int i = row_begin; i < row_end; ++i) {
    const int h = i * tile.stride_h + tile.r * tile.dilation_h - tile.pad_h;
    if (h >= 0 && h < spec.in_height) ++rows;
  }
  std::int64_t cols = 0;
  for (int j = 0; j < spec.out_width(); ++j) {
    const int w = j * tile.stride_w + tile.s * tile.dilation_w - tile.pad_w;
    if (w >= 0 && w < spec.in_width) ++cols;
  }
  return rows * cols * groups;
}

VectorMemoryImage pack_hwcn(const Tensor& ifmap, const ConvSpec& spec,
                            const ArchConfig& arch, const PackRegion& region) {
  spec.validate();
  arch.validate();
  const int c0 = region.channel_begin;
  const int c1 = resolve_end(region.channel_end, spec.in_channels);
  const int b0 = region.batch_begin;
  const int b1 = resolve_end(region.batch_end, spec.batch);
  const int r0 = region.row_begin;
  const int r1 = resolve_end(region.row_end, spec.out_height());
  if (c0 < 0 || c1 > spec.in_channels || c0 >= c1 || b0 < 0 || b1 > spec.batch ||
      b0 >= b1 || r0 < 0 || r1 > spec.out_height() || r0 >= r1) {
    fail(ErrorCode::Shape, "pack region outside the layer");
  }
  const int channels = c1 - c0;
  const int copies = region.copies.empty() ? 1 : static_cast<int>(region.copies.size());
  if (channels * copies > arch.num_vector_memories) {
    fail(ErrorCode::Capacity,
         fmt::format("{} channels x {} copies need {} vector memories, have {}", channels,
                     copies, channels * copies, arch.num_vector_memories));
  }

  VectorMemoryImage img;
  img.word_elems_ = arch.word_elems;
  img.elem_bytes_ = arch.elem_bytes;
  img.batch_begin_ = b0;
  img.batch_end_ = b1;
  img.groups_ = (b1 - b0 + arch.word_elems - 1) / arch.word_elems;
  img.tiles_ = region.copies;
  img.arrays_.assign(arch.num_vector_memories, {});
  img.occupancy_.assign(arch.num_vector_memories, std::nullopt);

  for (int t = 0; t < copies; ++t) {
    std::vector<Coord> coords;
    if (region.copies.empty()) {
      for (int h = 0; h < spec.in_height; ++h)
        for (int w = 0; w < spec.in_width; ++w) coords.push_back({h, w});
    } else {
      const TileDescriptor& tile = region.copies[t];
      for (const auto& [i, j] : band_positions(spec, r0, r1)) {
        const Coord p = tile.gather(i, j);
        if (in_bounds(spec, p)) coords.push_back(p);
      }
    }
    std::map<Coord, std::int64_t> index;
    std::vector<Coord> unique;
    for (const Coord& p : coords) {
      if (index.emplace(p, static_cast<std::int64_t>(unique.size())).second) unique.push_back(p);
    }
    const std::int64_t words = static_cast<std::int64_t>(unique.size()) * img.groups_;
    const std::int64_t bytes = words * arch.word_bytes();
    if (bytes > arch.sram_capacity_bytes) {
      fail(ErrorCode::Capacity,
           fmt::format("vector memory needs {} bytes, capacity {} bytes", bytes,
                       arch.sram_capacity_bytes));
    }
    for (int c = c0; c < c1; ++c) {
      const int array = t * channels + (c - c0);
      auto& store = img.arrays_[array];
      store.assign(static_cast<std::size_t>(words) * arch.word_elems, 0.0f);
      for (int g = 0; g < img.groups_; ++g) {
        for (std::size_t p = 0; p < unique.size(); ++p) {
          const std::size_t base =
              (static_cast<std::size_t>(g) * unique.size() + p) * arch.word_elems;
          for (int lane = 0; lane < arch.word_elems; ++lane) {
            const int n = b0 + g * arch.word_elems + lane;
            if (n < b1) store[base + lane] = ifmap.at(n, c, unique[p].h, unique[p].w);
          }
        }
      }
      img.occupancy_[array] = VectorMemoryImage::Slot{c, t};
      img.array_of_[{c, t}] = array;
    }
    img.copy_coords_.push_back(std::move(unique));
    img.copy_index_.push_back(std::move(index));
  }
  return img;
}

// ---------------------------------------------------------------------------

std::int64_t AccessTrace::reads() const {
  return std::count_if(accesses.begin(), accesses.end(),
                       [](const Access& a) { return a.kind == AccessKind::Read; });
}

std::int64_t AccessTrace::writes() const {
  return static_cast<std::int64_t>(accesses.size()) - reads();
}

AccessTrace address_schedule(const VectorMemoryImage& image, const ConvSpec& spec,
                             const ArchConfig& arch, const PackRegion& region,
                             const ScheduleOptions& options) {
  const int w = image.word_elems();
  const int r0 = region.row_begin;
  const int r1 = resolve_end(region.row_end, spec.out_height());
  const auto positions = band_positions(spec, r0, r1);
  const auto per_group = static_cast<std::int64_t>(positions.size());

  AccessTrace trace;
  trace.stream_slots = per_group * image.groups();
  std::vector<std::unordered_set<std::int64_t>> busy(image.num_arrays());

  for (int array = 0; array < image.num_arrays(); ++array) {
    const auto slot = image.occupant(array);
    if (!slot) continue;
    const TileDescriptor* tile = image.copy_tile(slot->copy);
    for (std::int64_t k = 0; k < trace.stream_slots; ++k) {
      const int group = static_cast<int>(k / per_group);
      const auto [i, j] = positions[k % per_group];
      const Coord p = tile ? tile->gather(i, j) : Coord{i, j};
      const auto addr = in_bounds(spec, p) ? image.address_of(slot->copy, group, p)
                                           : std::nullopt;
      if (!addr) {
        ++trace.zero_injected;
        continue;
      }
      const std::int64_t cycle = array + k * w;
      busy[array].insert(cycle);
      trace.accesses.push_back({cycle, array, *addr, AccessKind::Read, k});
    }
  }

  // Deserializer write-backs: column j's word k is complete once the last lane
  // of stream slot k has crossed every PE row.
  const int columns = std::min(options.output_columns, image.num_arrays());
  for (int col = 0; col < columns; ++col) {
    const std::int64_t base = image.words(col);
    std::int64_t cursor = 0;
    for (std::int64_t k = 0; k < trace.stream_slots; ++k) {
      std::int64_t cycle = std::max(cursor, (k + 1) * w + arch.array_rows + col);
      while (busy[col].contains(cycle)) ++cycle;
      busy[col].insert(cycle);
      trace.accesses.push_back({cycle, col, base + k, AccessKind::Write, k});
      cursor = cycle + 1;
    }
  }

  std::sort(trace.accesses.begin(), trace.accesses.end(), [](const Access& a, const Access& b) {
    return a.cycle != b.cycle ? a.cycle < b.cycle : a.array < b.array;
  });
  trace.span_cycles = trace.accesses.empty() ? 0 : trace.accesses.back().cycle + 1;
  if (!port_exclusive(trace)) {
    fail(ErrorCode::Internal, "address schedule double-booked a vector memory port");
  }
  return trace;
}

bool port_exclusive(const AccessTrace& trace) {
  for (std::size_t i = 1; i < trace.accesses.size(); ++i) {
    const Access& a = trace.accesses[i - 1];
    const Access& b = trace.accesses[i];
    if (a.cycle == b.cycle && a.array == b.array) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::int64_t dram_run_cycles(std::int64_t run_bytes, std::int64_t runs, const ArchConfig& arch) {
  if (runs <= 0) return 0;
  return runs * run_cost(run_bytes, arch);
}

DramTransfer dram_fill(std::span<const Coord> coords, DramLayout layout, const ConvSpec& spec,
                       const ArchConfig& arch, const DramRequest& request) {
  DramTransfer out;
  if (coords.empty()) return out;
  const int c0 = request.channel_begin;
  const int c1 = resolve_end(request.channel_end, spec.in_channels);
  const int channels = c1 - c0;
  const std::int64_t group =
      request.batch_group > 0 ? request.batch_group : std::min(spec.batch, arch.word_elems);
  const std::int64_t elem = group * arch.elem_bytes;  // bytes per (h, w, c)
  const std::int64_t H = spec.in_height;
  const std::int64_t W = spec.in_width;
  const std::int64_t C = spec.in_channels;

  std::vector<Interval> intervals;
  intervals.reserve(coords.size());
  if (layout == DramLayout::HWC) {
    for (const Coord& p : coords) {
      const std::int64_t begin = ((p.h * W + p.w) * C + c0) * elem;
      intervals.push_back({begin, begin + channels * elem});
    }
    const auto merged = merge_intervals(std::move(intervals), arch.dram_burst_bytes);
    for (const Interval& iv : merged) {
      out.bytes += iv.end - iv.begin;
      out.cycles += run_cost(iv.end - iv.begin, arch);
    }
    out.runs = static_cast<std::int64_t>(merged.size());
    return out;
  }

  // CHW: every channel plane repeats the same pattern shifted by H*W*elem.
  const std::int64_t plane = H * W * elem;
  if (arch.dram_burst_bytes > 0) {
    for (int c = c0; c < c1; ++c) {
      for (const Coord& p : coords) {
        const std::int64_t begin = c * plane + (p.h * W + p.w) * elem;
        intervals.push_back({begin, begin + elem});
      }
    }
    const auto merged = merge_intervals(std::move(intervals), arch.dram_burst_bytes);
    for (const Interval& iv : merged) {
      out.bytes += iv.end - iv.begin;
      out.cycles += run_cost(iv.end - iv.begin, arch);
    }
    out.runs = static_cast<std::int64_t>(merged.size());
    return out;
  }

  for (const Coord& p : coords) {
    const std::int64_t begin = (p.h * W + p.w) * elem;
    intervals.push_back({begin, begin + elem});
  }
  const auto one = merge_intervals(std::move(intervals), 0);
  std::int64_t plane_bytes = 0;
  for (const Interval& iv : one) plane_bytes += iv.end - iv.begin;
  out.bytes = plane_bytes * channels;
  const bool joins = one.front().begin == 0 && one.back().end == plane;
  if (!joins || channels == 1) {
    std::int64_t cost = 0;
    for (const Interval& iv : one) cost += run_cost(iv.end - iv.begin, arch);
    out.runs = static_cast<std::int64_t>(one.size()) * channels;
    out.cycles = cost * channels;
  } else if (one.size() == 1) {
    out.runs = 1;
    out.cycles = run_cost(plane * channels, arch);
  } else {
    // Last run of plane c fuses with the first run of plane c + 1.
    const std::int64_t first = one.front().end - one.front().begin;
    const std::int64_t last = one.back().end - one.back().begin;
    std::int64_t middle = 0;
    for (std::size_t i = 1; i + 1 < one.size(); ++i) middle += run_cost(one[i].end - one[i].begin, arch);
    out.runs = static_cast<std::int64_t>(one.size() - 2) * channels + (channels - 1) + 2;
    out.cycles = middle * channels + (channels - 1) * run_cost(first + last, arch) +
                 run_cost(first, arch) + run_cost(last, arch);
  }
  return out;
}

std::int64_t dram_fill_cost(std::span<const Coord> coords, DramLayout layout,
                            const ConvSpec& spec, const ArchConfig& arch) {
  return dram_fill(coords, layout, spec, arch).cycles;
}

}  // namespace im2colsim
