#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "im2colsim/arch_config.hpp"
#include "im2colsim/conv_spec.hpp"
#include "im2colsim/lowering.hpp"
#include "im2colsim/tensor.hpp"

namespace im2colsim {

// ---------------------------------------------------------------------------
// Vector memories

/// What part of the IFMap goes on chip for one pass.
struct PackRegion {
  /// One duplicated copy of the channel block per tile. Empty means a single
  /// copy holding every IFMap coordinate.
  std::vector<TileDescriptor> copies;
  int channel_begin = 0;
  int channel_end = -1;  // -1: all channels
  int batch_begin = 0;
  int batch_end = -1;  // -1: whole batch
  int row_begin = 0;   // output-row band
  int row_end = -1;
};

/// HWCN image of the IFMap across the vector memories. Array i holds channel
/// channel_begin + (i mod C), copy floor(i / C); each word packs one (h, w, c)
/// position across up to word_elems batch elements, zero padded.
class VectorMemoryImage {
 public:
  struct Slot {
    int channel = 0;
    int copy = 0;
  };

  int word_elems() const { return word_elems_; }
  int num_arrays() const { return static_cast<int>(arrays_.size()); }
  int active_arrays() const { return static_cast<int>(array_of_.size()); }
  int copies() const { return static_cast<int>(copy_coords_.size()); }
  int groups() const { return groups_; }
  int batch_begin() const { return batch_begin_; }
  int batch_end() const { return batch_end_; }

  std::optional<Slot> occupant(int array) const { return occupancy_[array]; }
  std::optional<int> array_of(int channel, int copy) const;

  std::int64_t words(int array) const {
    return static_cast<std::int64_t>(arrays_[array].size()) / word_elems_;
  }
  std::span<const float> word(int array, std::int64_t address) const;

  /// Word address of coordinate `p` of batch group `group` within `copy`.
  std::optional<std::int64_t> address_of(int copy, int group, Coord p) const;
  /// Convenience: the word holding `p` for group 0 in `array`.
  std::span<const float> word_at(int array, Coord p, int group = 0) const;

  const std::vector<Coord>& copy_coords(int copy) const { return copy_coords_[copy]; }
  const TileDescriptor* copy_tile(int copy) const;

  std::int64_t resident_bytes() const;

 private:
  friend VectorMemoryImage pack_hwcn(const Tensor&, const ConvSpec&, const ArchConfig&,
                                     const PackRegion&);

  int word_elems_ = 1;
  int elem_bytes_ = 4;
  int groups_ = 1;
  int batch_begin_ = 0;
  int batch_end_ = 1;
  std::vector<std::vector<float>> arrays_;
  std::vector<std::optional<Slot>> occupancy_;
  std::map<std::pair<int, int>, int> array_of_;
  std::vector<TileDescriptor> tiles_;
  std::vector<std::vector<Coord>> copy_coords_;
  std::vector<std::map<Coord, std::int64_t>> copy_index_;
};

/// Throws Error(Capacity) if a vector memory overflows or the channel block
/// times the copy count exceeds the number of vector memories.
VectorMemoryImage pack_hwcn(const Tensor& ifmap, const ConvSpec& spec,
                            const ArchConfig& arch, const PackRegion& region = {});

/// Words one copy of a pass keeps in each vector memory (all batch groups).
std::int64_t words_per_array(const ConvSpec& spec, const TileDescriptor& tile,
                             int row_begin, int row_end, int groups);

// ---------------------------------------------------------------------------
// Address generation

enum class AccessKind { Read, Write };

struct Access {
  std::int64_t cycle = 0;
  int array = 0;
  std::int64_t address = 0;
  AccessKind kind = AccessKind::Read;
  std::int64_t slot = 0;  // stream word index (reads) or output word index (writes)
};

struct AccessTrace {
  std::vector<Access> accesses;  // sorted by (cycle, array)
  std::int64_t stream_slots = 0;   // words streamed per active array
  std::int64_t zero_injected = 0;  // padding words served without a read
  std::int64_t span_cycles = 0;    // last access cycle + 1
  std::int64_t reads() const;
  std::int64_t writes() const;
};

struct ScheduleOptions {
  int output_columns = 0;  // deserializer columns writing OFMap words back
};

/// Skewed read streams for every active array (array i lags array 0 by i
/// cycles, one read per word_elems cycles) with OFMap write-backs placed in
/// free port cycles. Throws Error(Internal) if a port is ever double-booked.
AccessTrace address_schedule(const VectorMemoryImage& image, const ConvSpec& spec,
                             const ArchConfig& arch, const PackRegion& region,
                             const ScheduleOptions& options = {});

/// True when no (array, cycle) pair carries more than one access.
bool port_exclusive(const AccessTrace& trace);

// ---------------------------------------------------------------------------
// DRAM

enum class DramLayout { CHW, HWC };

struct DramRequest {
  int channel_begin = 0;
  int channel_end = -1;  // -1: all
  int batch_group = 0;   // elements per position per channel; 0: min(N, word_elems)
};

struct DramTransfer {
  std::int64_t runs = 0;
  std::int64_t bytes = 0;
  std::int64_t cycles = 0;
};

/// Linearize the coordinates under `layout` (batch group innermost), merge
/// into maximal contiguous runs, and cost each run as fixed latency plus
/// ceil(bytes / bytes_per_cycle).
DramTransfer dram_fill(std::span<const Coord> coords, DramLayout layout,
                       const ConvSpec& spec, const ArchConfig& arch,
                       const DramRequest& request = {});

std::int64_t dram_fill_cost(std::span<const Coord> coords, DramLayout layout,
                            const ConvSpec& spec, const ArchConfig& arch);

/// Cost of `runs` contiguous runs of `run_bytes` each.
std::int64_t dram_run_cycles(std::int64_t run_bytes, std::int64_t runs, const ArchConfig& arch);

}  // namespace im2colsim
