#include "im2colsim/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"
#include "im2colsim/memmodel.hpp"
#include "im2colsim/systolic.hpp"
#include "im2colsim/timeline.hpp"

namespace im2colsim {
namespace {

std::int64_t cdiv(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

struct Range {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

std::vector<Range> chunks(int total, int step) {
  std::vector<Range> out;
  for (int b = 0; b < total; b += step) out.push_back({b, std::min(total, b + step)});
  return out;
}

Tensor submatrix(const Tensor& m, std::int64_t r0, std::int64_t r1, std::int64_t c0,
                 std::int64_t c1) {
  Tensor out = Tensor::matrix(r1 - r0, c1 - c0);
  for (std::int64_t r = r0; r < r1; ++r)
    for (std::int64_t c = c0; c < c1; ++c) out.at(r - r0, c - c0) = m.at(r, c);
  return out;
}

// State shared by every method: the timeline, counters and the array itself.
struct Engine {
  const ArchConfig& arch;
  SimOptions options;
  Timeline timeline;
  SimReport rep;
  SystolicArray array;

  Engine(const ArchConfig& a, const SimOptions& o)
      : arch(a), options(o), array(a.array_rows, a.array_cols) {}

  Tensor multiply(const Tensor& inputs, const Tensor& weights) const {
    if (options.cycle_accurate) return array.run_cycle_accurate(inputs, weights).outputs;
    Tensor out = Tensor::matrix(inputs.rows(), weights.cols());
    SystolicArray::accumulate(inputs, weights, out);
    return out;
  }

  std::int64_t weight_fetch_cycles(int rows, int cols) const {
    return dram_run_cycles(std::int64_t{rows} * cols * arch.elem_bytes, 1, arch);
  }

  SimReport finish(std::int64_t useful_macs) {
    const auto totals = timeline.finish(std::int64_t{arch.array_rows} + arch.array_cols - 2);
    rep.total_cycles = totals.total;
    rep.compute_cycles = totals.compute;
    rep.stall_cycles = totals.stall;
    rep.weight_load_cycles = totals.weight_load;
    rep.warmup_cycles = totals.warmup;
    rep.tail_cycles = totals.tail;
    rep.useful_macs = useful_macs;
    const double cycles = static_cast<double>(std::max<std::int64_t>(1, rep.total_cycles));
    rep.achieved_flops = static_cast<double>(useful_macs) / cycles;
    rep.pe_utilization =
        rep.achieved_flops / (static_cast<double>(arch.array_rows) * arch.array_cols);
    const double port_cycles = cycles * arch.num_vector_memories;
    rep.sram_idle_ratio =
        std::max(0.0, 1.0 - static_cast<double>(rep.sram_reads + rep.sram_writes) / port_cycles);
    return rep;
  }
};

// Batch groups of up to word_elems elements, as (group size, how many).
std::vector<std::pair<int, int>> group_sizes(int batch, int word_elems) {
  const int full = batch / word_elems;
  const int rest = batch % word_elems;
  std::vector<std::pair<int, int>> out;
  if (full > 0) out.emplace_back(word_elems, full);
  if (rest > 0) out.emplace_back(rest, 1);
  return out;
}

DramTransfer fill_all_groups(const std::vector<Coord>& coords, DramLayout layout,
                             const ConvSpec& spec, const ArchConfig& arch, Range channels) {
  DramTransfer total;
  for (const auto& [size, count] : group_sizes(spec.batch, arch.word_elems)) {
    const DramTransfer one =
        dram_fill(coords, layout, spec, arch, {channels.begin, channels.end, size});
    total.runs += one.runs * count;
    total.bytes += one.bytes * count;
    total.cycles += one.cycles * count;
  }
  return total;
}

std::vector<Coord> band_union(const ConvSpec& spec, const std::vector<TileDescriptor>& tiles,
                              Range rows) {
  std::vector<Coord> coords;
  for (const TileDescriptor& tile : tiles) {
    for (int i = rows.begin; i < rows.end; ++i) {
      for (int j = 0; j < spec.out_width(); ++j) {
        const Coord p = tile.gather(i, j);
        if (in_bounds(spec, p)) coords.push_back(p);
      }
    }
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

// Dense receptive rectangle of one tile over an output-row band, clipped.
std::vector<Coord> receptive_rect(const ConvSpec& spec, const TileDescriptor& tile, Range rows) {
  const Coord lo = tile.gather(rows.begin, 0);
  const Coord hi = tile.gather(rows.end - 1, spec.out_width() - 1);
  std::vector<Coord> coords;
  for (int h = std::max(0, lo.h); h <= std::min(spec.in_height - 1, hi.h); ++h)
    for (int w = std::max(0, lo.w); w <= std::min(spec.in_width - 1, hi.w); ++w)
      coords.push_back({h, w});
  return coords;
}

[[noreturn]] void capacity_error(std::int64_t need_words, const ArchConfig& arch,
                                 std::string_view what) {
  fail(ErrorCode::Capacity,
       fmt::format("{} needs {} bytes per vector memory, capacity {} bytes", what,
                   need_words * arch.word_bytes(), arch.sram_capacity_bytes));
}

// ---------------------------------------------------------------------------
// Implicit methods: output-row band -> channel group -> filter pass -> column tile.

struct ConvPass {
  Range rows;
  Range channels;
  std::vector<TileDescriptor> tiles;
  std::int64_t fill_cycles = 0;      // DRAM: inputs plus weights for every column tile
  std::int64_t fill_bytes = 0;
  std::int64_t fill_words_max = 0;   // SRAM writes landing in the busiest array
  std::int64_t fill_words_total = 0;
  std::int64_t reads_max = 0;        // per-array reads per stream
  std::int64_t reads_total = 0;
};

struct ConvLayout {
  int groups = 1;
  std::vector<Range> bands;
  std::vector<Range> channel_groups;
  std::vector<std::vector<TileDescriptor>> passes;
  std::vector<Range> column_tiles;
};

Range rows_of(int begin, int count, int total) { return {begin, std::min(total, begin + count)}; }

std::vector<Range> make_bands(int total, int rows) {
  std::vector<Range> out;
  for (int b = 0; b < total; b += rows) out.push_back(rows_of(b, rows, total));
  return out;
}

void run_implicit(const ConvSpec& spec, Method method, const Tensor* ifmap,
                  const Tensor* filters, Tensor* ofmap, Engine& e) {
  const ArchConfig& arch = e.arch;
  const bool channel_first = method == Method::ChannelFirstImplicit;
  const int w = arch.word_elems;
  const int wo = spec.out_width();
  const std::int64_t cap_words = arch.sram_capacity_bytes / arch.word_bytes();
  const std::int64_t psum_words_per_pos = cdiv(spec.out_channels, arch.num_vector_memories);

  ConvLayout lay;
  lay.groups = static_cast<int>(cdiv(spec.batch, w));
  const std::int64_t g = lay.groups;
  lay.channel_groups = chunks(spec.in_channels, arch.array_rows);
  lay.column_tiles = chunks(spec.out_channels, arch.array_cols);
  if (channel_first) {
    lay.passes = plan_multi_tile(spec, arch).passes;
  } else {
    for (const TileDescriptor& t : decompose_tiles(spec)) lay.passes.push_back({t});
  }

  // Band height: two input buffers plus the band's partial sums per vector memory.
  int band_rows = 0;
  if (channel_first) {
    const std::int64_t per_row = wo * g * (2 + psum_words_per_pos);
    band_rows = static_cast<int>(std::min<std::int64_t>(spec.out_height(), cap_words / per_row));
    if (band_rows < 1) capacity_error(per_row, arch, "one output row");
  } else {
    const std::int64_t cols_in = std::int64_t{wo - 1} * spec.stride_w + 1;
    auto need = [&](int rows) {
      const std::int64_t rows_in = std::int64_t{rows - 1} * spec.stride_h + 1;
      return 2 * rows_in * cols_in * g + std::int64_t{rows} * wo * g * psum_words_per_pos;
    };
    band_rows = spec.out_height();
    while (band_rows > 0 && need(band_rows) > cap_words) --band_rows;
    if (band_rows < 1) capacity_error(need(1), arch, "one output row");
  }
  lay.bands = make_bands(spec.out_height(), band_rows);

  std::int64_t weight_fetch = 0;
  for (const Range& ct : lay.column_tiles) weight_fetch += e.weight_fetch_cycles(arch.array_rows, ct.size());

  std::vector<ConvPass> work;
  for (const Range& band : lay.bands) {
    for (const Range& cg : lay.channel_groups) {
      for (const auto& tiles : lay.passes) {
        ConvPass p{band, cg, tiles};
        for (const TileDescriptor& t : tiles) {
          const std::int64_t words = words_per_array(spec, t, band.begin, band.end, lay.groups);
          p.reads_max = std::max(p.reads_max, words);
          p.reads_total += words * cg.size();
        }
        DramTransfer fill;
        if (channel_first) {
          fill = fill_all_groups(band_union(spec, tiles, band), DramLayout::HWC, spec, arch, cg);
          p.fill_words_max = p.reads_max;
          p.fill_words_total = p.reads_total;
        } else {
          const auto rect = receptive_rect(spec, tiles.front(), band);
          fill = fill_all_groups(rect, DramLayout::CHW, spec, arch, cg);
          p.fill_words_max = static_cast<std::int64_t>(rect.size()) * g;
          p.fill_words_total = p.fill_words_max * cg.size();
          fill.cycles += std::int64_t{arch.addr_gen_overhead_cycles} * cg.size();
          // Crossbar front end reads single elements, not packed words.
          p.reads_total = 0;
          for (const TileDescriptor& t : tiles)
            p.reads_total += words_per_array(spec, t, band.begin, band.end, 1) * spec.batch * cg.size();
        }
        p.fill_cycles = fill.cycles + weight_fetch;
        p.fill_bytes = fill.bytes;
        work.push_back(std::move(p));
      }
    }
  }

  e.rep.bands = static_cast<int>(lay.bands.size());
  e.rep.tiles_per_pass = channel_first ? plan_multi_tile(spec, arch).tiles_per_pass : 1;
  e.rep.duplication_factor = e.rep.tiles_per_pass;

  const auto n_ct = static_cast<std::int64_t>(lay.column_tiles.size());
  for (std::size_t idx = 0; idx < work.size(); ++idx) {
    const ConvPass& p = work[idx];
    const std::int64_t positions = std::int64_t{p.rows.size()} * wo;
    const std::int64_t stream = positions * g * w;
    const std::int64_t next_fill = idx + 1 < work.size() ? work[idx + 1].fill_words_max : 0;

    e.rep.resident_sram_bytes = std::max<std::int64_t>(
        e.rep.resident_sram_bytes, std::int64_t{static_cast<int>(p.tiles.size())} *
                                       p.channels.size() * positions * g * arch.word_bytes());
    e.rep.dram_bytes_read += p.fill_bytes;
    e.rep.sram_writes += p.fill_words_total;
    e.timeline.begin_group(p.fill_cycles);

    // Functional operand: one lowered-matrix row per (batch group, position, lane).
    std::optional<Tensor> operand;
    std::vector<std::pair<int, const TileDescriptor*>> row_map;  // channel, tile per column
    if (ifmap != nullptr) {
      PackRegion region{p.tiles, p.channels.begin, p.channels.end, 0, -1, p.rows.begin, p.rows.end};
      if (channel_first) {
        const VectorMemoryImage image = pack_hwcn(*ifmap, spec, arch, region);
        const AccessTrace trace = address_schedule(
            image, spec, arch, region, {std::min(spec.out_channels, arch.array_cols)});
        operand = Tensor::matrix(trace.stream_slots * w, image.active_arrays());
        for (const Access& a : trace.accesses) {
          if (a.kind != AccessKind::Read) continue;
          const auto word = image.word(a.array, a.address);
          for (int l = 0; l < w; ++l) operand->at(a.slot * w + l, a.array) = word[l];
        }
        for (int a = 0; a < image.active_arrays(); ++a) {
          const auto slot = image.occupant(a);
          row_map.emplace_back(slot->channel, &p.tiles[slot->copy]);
        }
      } else {
        const TileDescriptor& tile = p.tiles.front();
        operand = Tensor::matrix(stream, p.channels.size());
        for (int c = p.channels.begin; c < p.channels.end; ++c) {
          row_map.emplace_back(c, &tile);
          for (std::int64_t k = 0; k < positions * g; ++k) {
            const int i = p.rows.begin + static_cast<int>((k % positions) / wo);
            const int j = static_cast<int>((k % positions) % wo);
            const Coord q = tile.gather(i, j);
            if (!in_bounds(spec, q)) continue;
            for (int l = 0; l < w; ++l) {
              const int n = static_cast<int>(k / positions) * w + l;
              if (n < spec.batch) operand->at(k * w + l, c - p.channels.begin) = ifmap->at(n, c, q.h, q.w);
            }
          }
        }
      }
    }

    for (const Range& ct : lay.column_tiles) {
      std::int64_t port_stall = 0;
      if (channel_first) {
        const std::int64_t demand = p.reads_max + positions * g + cdiv(next_fill, n_ct);
        port_stall = std::max<std::int64_t>(0, demand - stream);
      }
      e.timeline.add_step({stream, arch.array_rows, port_stall});
      ++e.rep.passes;
      e.rep.sram_reads += p.reads_total;
      e.rep.sram_writes += std::int64_t{ct.size()} * positions * g;

      if (operand) {
        Tensor weights = Tensor::matrix(row_map.size(), ct.size());
        for (std::size_t a = 0; a < row_map.size(); ++a) {
          const auto& [c, tile] = row_map[a];
          for (int co = ct.begin; co < ct.end; ++co)
            weights.at(a, co - ct.begin) = filters->at(co, c, tile->r, tile->s);
        }
        const Tensor out = e.multiply(*operand, weights);
        for (std::size_t row = 0; row < out.rows(); ++row) {
          const auto k = static_cast<std::int64_t>(row) / w;
          const int n = static_cast<int>(k / positions) * w + static_cast<int>(row % w);
          if (n >= spec.batch) continue;
          const int i = p.rows.begin + static_cast<int>((k % positions) / wo);
          const int j = static_cast<int>((k % positions) % wo);
          for (int co = ct.begin; co < ct.end; ++co) ofmap->at(n, co, i, j) += out.at(row, co - ct.begin);
        }
      }
    }

    const bool band_done = idx + 1 == work.size() || work[idx + 1].rows.begin != p.rows.begin;
    if (band_done) {
      const std::int64_t positions_all = positions * spec.batch;
      const std::int64_t bytes = positions_all * spec.out_channels * arch.elem_bytes;
      e.rep.ofmap_bytes_written += bytes;
      e.rep.sram_reads += std::int64_t{spec.out_channels} * positions * g;
      e.timeline.write_back(dram_run_cycles(bytes, 1, arch));
    }
  }
}

// ---------------------------------------------------------------------------
// GEMM on the array: M-band -> K-chunk -> column tile. `a` and `b` optional.

void run_gemm(std::int64_t m, std::int64_t k, std::int64_t n, const Tensor* a, const Tensor* b,
              Tensor* out, Engine& e) {
  const ArchConfig& arch = e.arch;
  const int w = arch.word_elems;
  const std::int64_t cap_words = arch.sram_capacity_bytes / arch.word_bytes();
  const std::int64_t per_word = 2 + cdiv(n, arch.num_vector_memories);
  const std::int64_t band_words = cap_words / per_word;
  if (band_words < 1) capacity_error(per_word, arch, "one GEMM row word");
  const std::int64_t band_m = std::min(m, band_words * w);

  const auto k_chunks = chunks(static_cast<int>(k), arch.array_rows);
  const auto col_tiles = chunks(static_cast<int>(n), arch.array_cols);
  const auto n_ct = static_cast<std::int64_t>(col_tiles.size());
  std::int64_t weight_fetch = 0;
  for (const Range& ct : col_tiles) weight_fetch += e.weight_fetch_cycles(arch.array_rows, ct.size());

  e.rep.bands = static_cast<int>(cdiv(m, band_m));
  for (std::int64_t r0 = 0; r0 < m; r0 += band_m) {
    const std::int64_t r1 = std::min(m, r0 + band_m);
    const std::int64_t words = cdiv(r1 - r0, w);
    const std::int64_t stream = words * w;
    for (std::size_t kc = 0; kc < k_chunks.size(); ++kc) {
      const Range chunk = k_chunks[kc];
      const std::int64_t bytes = (r1 - r0) * chunk.size() * arch.elem_bytes;
      e.rep.dram_bytes_read += bytes;
      e.rep.sram_writes += words * chunk.size();
      e.timeline.begin_group(dram_run_cycles(bytes, 1, arch) + weight_fetch);
      const bool more = kc + 1 < k_chunks.size() || r1 < m;
      const std::int64_t next_fill = more ? words : 0;

      std::optional<Tensor> lhs;
      if (a != nullptr) lhs = submatrix(*a, r0, r1, chunk.begin, chunk.end);
      for (const Range& ct : col_tiles) {
        const std::int64_t demand = words + words + cdiv(next_fill, n_ct);
        e.timeline.add_step({stream, arch.array_rows, std::max<std::int64_t>(0, demand - stream)});
        ++e.rep.passes;
        e.rep.sram_reads += words * chunk.size();
        e.rep.sram_writes += words * ct.size();
        if (lhs) {
          const Tensor res = e.multiply(*lhs, submatrix(*b, chunk.begin, chunk.end, ct.begin, ct.end));
          for (std::int64_t r = r0; r < r1; ++r)
            for (int c = ct.begin; c < ct.end; ++c) out->at(r, c) += res.at(r - r0, c - ct.begin);
        }
      }
    }
    const std::int64_t bytes = (r1 - r0) * n * arch.elem_bytes;
    e.rep.ofmap_bytes_written += bytes;
    e.rep.sram_reads += n * words;
    e.timeline.write_back(dram_run_cycles(bytes, 1, arch));
  }
}

Tensor matrix_to_nhwc(const Tensor& m, const ConvSpec& spec) {
  Tensor out = Tensor::zeros(Layout::NHWC, ofmap_shape(spec));
  std::size_t row = 0;
  for (int n = 0; n < spec.batch; ++n)
    for (int i = 0; i < spec.out_height(); ++i)
      for (int j = 0; j < spec.out_width(); ++j, ++row)
        for (int co = 0; co < spec.out_channels; ++co) out.at(n, co, i, j) = m.at(row, co);
  return out;
}

SimResult run_conv(const ConvSpec& spec, const ArchConfig& arch, Method method,
                   const Tensor* ifmap, const Tensor* filters, const SimOptions& options) {
  spec.validate();
  arch.validate();
  Engine e(arch, options);
  SimResult result;
  switch (method) {
    case Method::ChannelFirstImplicit:
    case Method::ChannelLastImplicit: {
      Tensor ofmap;
      if (ifmap != nullptr) ofmap = Tensor::zeros(Layout::NHWC, ofmap_shape(spec));
      run_implicit(spec, method, ifmap, filters, ifmap ? &ofmap : nullptr, e);
      result.ofmap = std::move(ofmap);
      break;
    }
    case Method::ExplicitIm2col:
    case Method::PlainGemm: {
      if (method == Method::ExplicitIm2col) {
        const std::int64_t in_bytes = std::int64_t{spec.batch} * spec.in_channels *
                                      spec.in_height * spec.in_width * arch.elem_bytes;
        const std::int64_t lowered = lowered_memory_footprint(spec, arch.elem_bytes).lowered_bytes;
        const std::int64_t cycles =
            dram_run_cycles(in_bytes, 1, arch) + dram_run_cycles(lowered, 1, arch);
        e.timeline.dram_phase(cycles);
        e.rep.lowering_cycles = cycles;
        e.rep.dram_bytes_read += in_bytes;
        e.rep.dram_bytes_written += lowered;
      }
      std::optional<Tensor> lowered, weights, out;
      if (ifmap != nullptr) {
        lowered = im2col_explicit(*ifmap, spec, ColumnOrdering::ChannelLast);
        weights = lower_filter(*filters, spec, ColumnOrdering::ChannelLast);
        out = Tensor::matrix(spec.gemm_m(), spec.out_channels);
      }
      run_gemm(spec.gemm_m(), spec.gemm_k(), spec.out_channels, lowered ? &*lowered : nullptr,
               weights ? &*weights : nullptr, out ? &*out : nullptr, e);
      if (out) result.ofmap = matrix_to_nhwc(*out, spec);
      break;
    }
  }
  result.report = e.finish(spec.macs());
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ChannelFirstImplicit: return "ChannelFirstImplicit";
    case Method::ChannelLastImplicit: return "ChannelLastImplicit";
    case Method::ExplicitIm2col: return "ExplicitIm2col";
    case Method::PlainGemm: return "PlainGemm";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '_' && c != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "channelfirstimplicit" || key == "channelfirst" || key == "cf") return Method::ChannelFirstImplicit;
  if (key == "channellastimplicit" || key == "channellast" || key == "cl") return Method::ChannelLastImplicit;
  if (key == "explicitim2col" || key == "explicit") return Method::ExplicitIm2col;
  if (key == "plaingemm" || key == "gemm") return Method::PlainGemm;
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::ChannelFirstImplicit,
                                           Method::ChannelLastImplicit,
                                           Method::ExplicitIm2col, Method::PlainGemm};
  return methods;
}

bool needs_channel_split(const ConvSpec& spec, const ArchConfig& arch) {
  return spec.in_channels > arch.array_rows;
}

int multi_tile_count(const ConvSpec& spec, const ArchConfig& arch) {
  if (needs_channel_split(spec, arch)) return 1;
  int t = std::min(arch.array_rows / spec.in_channels, spec.filter_width);
  if (arch.max_multi_tile > 0) t = std::min(t, arch.max_multi_tile);
  return std::max(1, t);
}

MultiTilePlan plan_multi_tile(const ConvSpec& spec, const ArchConfig& arch) {
  MultiTilePlan plan;
  plan.tiles_per_pass = multi_tile_count(spec, arch);
  plan.duplication_factor = plan.tiles_per_pass;
  const auto tiles = decompose_tiles(spec);
  for (std::size_t i = 0; i < tiles.size(); i += plan.tiles_per_pass) {
    const auto end = std::min(tiles.size(), i + plan.tiles_per_pass);
    plan.passes.emplace_back(tiles.begin() + static_cast<std::ptrdiff_t>(i),
                             tiles.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

SimResult simulate(const ConvSpec& spec, const ArchConfig& arch, Method method,
                   const Tensor& ifmap, const Tensor& filters, const SimOptions& options) {
  const Shape4 in = ifmap.shape();
  const Shape4 f = filters.shape();
  if (!(in == ifmap_shape(spec)) || !(f == filter_shape(spec))) {
    fail(ErrorCode::Shape, fmt::format("tensors do not match {}", spec.to_string()));
  }
  return run_conv(spec, arch, method, &ifmap, &filters, options);
}

SimReport simulate_timing(const ConvSpec& spec, const ArchConfig& arch, Method method) {
  return run_conv(spec, arch, method, nullptr, nullptr, {}).report;
}

SimResult simulate_gemm(const Tensor& a, const Tensor& b, const ArchConfig& arch,
                        const SimOptions& options) {
  arch.validate();
  if (!a.is_matrix() || !b.is_matrix() || a.cols() != b.rows()) {
    fail(ErrorCode::Shape, "GEMM operands must be matrices with matching inner dims");
  }
  Engine e(arch, options);
  Tensor out = Tensor::matrix(a.rows(), b.cols());
  run_gemm(a.rows(), a.cols(), b.cols(), &a, &b, &out, e);
  SimResult result{std::move(out), e.finish(static_cast<std::int64_t>(a.rows() * a.cols() * b.cols()))};
  return result;
}

SimReport simulate_gemm_timing(std::int64_t m, std::int64_t k, std::int64_t n,
                               const ArchConfig& arch) {
  arch.validate();
  if (m < 1 || k < 1 || n < 1) fail(ErrorCode::Shape, "GEMM dims must be positive");
  Engine e(arch, {});
  run_gemm(m, k, n, nullptr, nullptr, nullptr, e);
  return e.finish(m * k * n);
}

}  // namespace im2colsim
