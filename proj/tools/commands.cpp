#include "commands.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "im2colsim/blocksched.hpp"
#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"
#include "im2colsim/lowering.hpp"
#include "im2colsim/simulator.hpp"
#include "im2colsim/sweep.hpp"
#include "im2colsim/workload.hpp"

namespace im2colsim::cli {
namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::Config:
    case ErrorCode::Shape: return kBadInput;
    case ErrorCode::Capacity: return kCapacity;
    case ErrorCode::Mismatch: return kMismatch;
    case ErrorCode::Internal: break;
  }
  return kFailure;
}

// Runs `body`, turning exceptions into a single error line.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: " << to_string(e.code()) << ": " << msg << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: E_INTERNAL: " << e.what() << '\n';
    return kFailure;
  }
}

Workload require_workload(const Options& opt) {
  if (opt.workload.empty()) fail(ErrorCode::Config, "--workload is required");
  return load_workload(opt.workload);
}

ArchConfig arch_of(const Options& opt) {
  return opt.arch.empty() ? ArchConfig::table2() : load_arch_config(opt.arch);
}

std::vector<Method> methods_of(const std::vector<std::string>& names,
                               const std::vector<Method>& fallback) {
  std::vector<Method> out;
  for (const std::string& list : names) {
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto m = parse_method(name);
      if (!m) fail(ErrorCode::Config, fmt::format("unknown method '{}'", name));
      out.push_back(*m);
    }
  }
  if (out.empty()) out = fallback;
  if (out.empty()) out = {Method::ChannelFirstImplicit};
  return out;
}

// CSV goes to a file when --out names one, else to `out`.
void emit(const Options& opt, std::ostream& out, const std::string& text) {
  if (opt.out.empty() || opt.out == "-") {
    out << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) fail(ErrorCode::Config, fmt::format("cannot write '{}'", opt.out));
  file << text;
}

bool same(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

std::uint64_t seed_of(const Options& opt, const Workload& w) { return opt.seed.value_or(w.seed); }

// Functional check of every layer under every method. Returns matched layers.
std::size_t verify_layers(const Workload& w, const ArchConfig& arch,
                          const std::vector<Method>& methods, std::uint64_t seed,
                          std::ostream& err, std::vector<SweepRow>* rows) {
  std::size_t matched = 0;
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    const NamedSpec& layer = w.layers[i];
    std::mt19937_64 rng(seed + i);
    const Tensor x = random_ifmap(layer.spec, rng);
    const Tensor f = random_filters(layer.spec, rng);
    const Tensor ref = direct_conv(x, f, layer.spec);
    bool ok = true;
    for (Method m : methods) {
      SimResult res;
      try {
        res = simulate(layer.spec, arch, m, x, f);
      } catch (const Error& e) {
        fail(e.code(), fmt::format("layer '{}': {}", layer.name, e.what()));
      }
      if (!same(res.ofmap, ref)) {
        ok = false;
        err << fmt::format("mismatch: layer '{}' method {}\n", layer.name, to_string(m));
      }
      if (rows) rows->push_back({layer.name, layer.spec, arch, m, res.report, {}, {}});
    }
    if (ok) ++matched;
    spdlog::debug("verified layer {} ({})", layer.name, ok ? "match" : "MISMATCH");
  }
  return matched;
}

std::vector<int> int_list(const nlohmann::json& grid, const char* key) {
  std::vector<int> out;
  if (!grid.contains(key)) return out;
  for (const auto& v : grid.at(key)) {
    if (v.is_string() && v.get<std::string>() == "auto") out.push_back(0);
    else out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workload w = require_workload(opt);
    const ArchConfig arch = arch_of(opt);
    const auto methods = methods_of(opt.methods, w.methods);
    std::vector<SweepRow> rows;
    int status = kOk;
    if (opt.verify) {
      const std::size_t matched = verify_layers(w, arch, methods, seed_of(opt, w), err, &rows);
      err << fmt::format("{}/{} match\n", matched, w.layers.size());
      if (matched != w.layers.size()) status = kMismatch;
    } else {
      rows = sweep(w.layers, {arch}, methods, opt.jobs);
      for (const SweepRow& r : rows) {
        if (r.error_code) {
          fail(*r.error_code, fmt::format("layer '{}': {}", r.layer, r.error.substr(r.error.find(": ") + 2)));
        }
        spdlog::info("{} {}: {} cycles", r.layer, to_string(r.method), r.report->total_cycles);
      }
    }
    std::ostringstream csv;
    write_sim_csv(csv, "simulate", rows);
    emit(opt, out, csv.str());
    return status;
  });
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workload w = require_workload(opt);
    const ArchConfig base = arch_of(opt);
    if (opt.grid.empty()) fail(ErrorCode::Config, "--grid is required");
    std::ifstream in(opt.grid);
    if (!in) fail(ErrorCode::Parse, fmt::format("cannot open '{}'", opt.grid));
    std::stringstream text;
    text << in.rdbuf();
    nlohmann::json grid;
    try {
      grid = nlohmann::json::parse(text.str());
    } catch (const nlohmann::json::parse_error& e) {
      const std::string body = text.str();
      const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, body.size());
      const auto line = 1 + std::count(body.begin(), body.begin() + upto, '\n');
      fail(ErrorCode::Parse, fmt::format("{}:{}: malformed JSON", opt.grid, line));
    }
    std::vector<ArchConfig> archs;
    std::vector<int> strides;
    std::vector<std::string> method_names = opt.methods;
    try {
      for (const auto& [key, value] : grid.items()) {
        if (key != "array_size" && key != "word_elems" && key != "stride" &&
            key != "max_multi_tile" && key != "methods") {
          fail(ErrorCode::Config, fmt::format("{}: unknown grid key '{}'", opt.grid, key));
        }
      }
      auto sizes = int_list(grid, "array_size");
      auto words = int_list(grid, "word_elems");
      auto caps = int_list(grid, "max_multi_tile");
      strides = int_list(grid, "stride");
      if (sizes.empty()) sizes = {base.array_rows};
      if (words.empty()) words = {base.word_elems};
      if (caps.empty()) caps = {base.max_multi_tile};
      if (grid.contains("methods") && method_names.empty()) {
        for (const auto& m : grid.at("methods")) method_names.push_back(m.get<std::string>());
      }
      for (int size : sizes) {
        for (int word : words) {
          for (int cap : caps) {
            ArchConfig a = base.with_array_size(size);
            a.word_elems = word;
            a.max_multi_tile = cap;
            a.validate();
            archs.push_back(a);
          }
        }
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Parse, fmt::format("{}: {}", opt.grid, e.what()));
    }
    std::vector<NamedSpec> specs;
    if (strides.empty()) {
      specs = w.layers;
    } else {
      for (int s : strides) {
        for (NamedSpec layer : w.layers) {
          layer.spec.stride_h = layer.spec.stride_w = s;
          specs.push_back(std::move(layer));
        }
      }
    }
    const auto rows = sweep(specs, archs, methods_of(method_names, w.methods), opt.jobs);
    for (const SweepRow& r : rows) {
      if (!r.error.empty()) spdlog::warn("{} {}: {}", r.layer, to_string(r.method), r.error);
    }
    std::ostringstream csv;
    write_sim_csv(csv, "sweep", rows);
    emit(opt, out, csv.str());
    return kOk;
  });
}

int cmd_overhead(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workload w = require_workload(opt);
    std::ostringstream csv;
    csv << "# " << kCsvVersion << " overhead\n"
        << "model,layer,elem_bytes,original_bytes,lowered_bytes,ratio\n";
    std::int64_t original = 0;
    std::int64_t lowered = 0;
    const std::string model = w.model.empty() ? "model" : w.model;
    for (const NamedSpec& layer : w.layers) {
      const MemoryFootprint fp = lowered_memory_footprint(layer.spec, w.elem_bytes);
      original += fp.original_bytes;
      lowered += fp.lowered_bytes;
      csv << fmt::format("{},{},{},{},{},{:.6f}\n", model, layer.name, w.elem_bytes,
                         fp.original_bytes, fp.lowered_bytes, fp.ratio);
    }
    const double ratio = original == 0 ? 0.0 : static_cast<double>(lowered) / original;
    csv << fmt::format("{},TOTAL,{},{},{},{:.6f}\n", model, w.elem_bytes, original, lowered, ratio);
    emit(opt, out, csv.str());
    return kOk;
  });
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workload w = require_workload(opt);
    const ArchConfig arch = arch_of(opt);
    const auto methods = opt.methods.empty() && w.methods.empty() ? all_methods()
                                                                  : methods_of(opt.methods, w.methods);
    const std::size_t matched = verify_layers(w, arch, methods, seed_of(opt, w), err, nullptr);
    out << fmt::format("{}/{} match\n", matched, w.layers.size());
    return matched == w.layers.size() ? kOk : kMismatch;
  });
}

int cmd_reuse(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workload w = require_workload(opt);
    std::ostringstream csv;
    csv << "# " << kCsvVersion << " reuse\n" << blocksched_csv_header() << '\n';
    for (const NamedSpec& layer : w.layers) {
      const ConvSpec& s = layer.spec;
      const BlockPlan plan =
          partition(s, opt.block_m > 0 ? opt.block_m : s.out_width(),
                    opt.block_n > 0 ? opt.block_n : s.out_channels,
                    opt.block_k > 0 ? opt.block_k : s.in_channels);
      // Edge taps of the first row can be all padding, so size from the largest set.
      std::int64_t set_elems = 0;
      for (std::size_t k = 0; k < plan.subtiles.size(); ++k)
        set_elems = std::max(set_elems, subtile_working_set(plan, {0, k}));
      const std::int64_t set_bytes = set_elems * w.elem_bytes;
      const auto budget = static_cast<std::int64_t>(opt.budget_sets * static_cast<double>(set_bytes));
      for (SubtileOrder order : {SubtileOrder::FilterMajor, SubtileOrder::ReuseAware}) {
        const ReuseTraffic t = reuse_traffic(plan, order_subtiles(plan, order), budget, w.elem_bytes);
        csv << blocksched_csv_row(layer.name, plan, order, budget, t) << '\n';
      }
    }
    emit(opt, out, csv.str());
    return kOk;
  });
}

}  // namespace im2colsim::cli
