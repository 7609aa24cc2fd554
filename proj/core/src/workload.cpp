#include "im2colsim/workload.hpp"

#include <fmt/format.h>

#include <set>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"
#include "json_util.hpp"

namespace im2colsim {
namespace {

using nlohmann::json;

ConvSpec parse_layer(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::Parse, where + ": layer must be an object");
  ConvSpec s;
  for (const auto& [key, value] : j.items()) {
    const auto v = [&] { return value.get<int>(); };
    if (key == "name") continue;
    if (key == "batch") s.batch = v();
    else if (key == "in_channels") s.in_channels = v();
    else if (key == "in_height") s.in_height = v();
    else if (key == "in_width") s.in_width = v();
    else if (key == "in_size") s.in_height = s.in_width = v();
    else if (key == "out_channels") s.out_channels = v();
    else if (key == "filter_height") s.filter_height = v();
    else if (key == "filter_width") s.filter_width = v();
    else if (key == "filter") s.filter_height = s.filter_width = v();
    else if (key == "stride_h") s.stride_h = v();
    else if (key == "stride_w") s.stride_w = v();
    else if (key == "stride") s.stride_h = s.stride_w = v();
    else if (key == "pad_h") s.pad_h = v();
    else if (key == "pad_w") s.pad_w = v();
    else if (key == "pad") s.pad_h = s.pad_w = v();
    else if (key == "dilation_h") s.dilation_h = v();
    else if (key == "dilation_w") s.dilation_w = v();
    else if (key == "dilation") s.dilation_h = s.dilation_w = v();
    else fail(ErrorCode::Config, fmt::format("{}: unknown layer key '{}'", where, key));
  }
  return s;
}

Tensor random_tensor(Shape4 shape, std::mt19937_64& rng, int lo, int hi) {
  Tensor t = Tensor::zeros(Layout::NCHW, shape);
  std::uniform_int_distribution<int> dist(lo, hi);
  for (float& x : t.data()) x = static_cast<float>(dist(rng));
  return t;
}

}  // namespace

Workload parse_workload(const std::string& text, const std::string& origin) {
  const json doc = detail::parse_json(text, origin);
  if (!doc.is_object()) fail(ErrorCode::Parse, origin + ": workload must be an object");
  Workload w;
  int default_batch = 1;
  int random_layers = 0;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "model") w.model = value.get<std::string>();
      else if (key == "elem_bytes") w.elem_bytes = value.get<int>();
      else if (key == "batch") default_batch = value.get<int>();
      else if (key == "seed") w.seed = value.get<std::uint64_t>();
      else if (key == "random_layers") random_layers = value.get<int>();
      else if (key == "methods") {
        for (const auto& m : value) {
          const auto method = parse_method(m.get<std::string>());
          if (!method) {
            fail(ErrorCode::Config, fmt::format("{}: unknown method '{}'", origin, m.get<std::string>()));
          }
          w.methods.push_back(*method);
        }
      } else if (key != "layers") {
        fail(ErrorCode::Config, fmt::format("{}: unknown workload key '{}'", origin, key));
      }
    }
    if (w.elem_bytes < 1) fail(ErrorCode::Config, origin + ": elem_bytes must be >= 1");
    if (random_layers < 0) fail(ErrorCode::Config, origin + ": random_layers must be >= 0");
    std::set<std::string> names;
    if (doc.contains("layers")) {
      const json& layers = doc.at("layers");
      if (!layers.is_array()) fail(ErrorCode::Parse, origin + ": 'layers' must be an array");
      for (std::size_t i = 0; i < layers.size(); ++i) {
        const json& entry = layers[i];
        std::string name = entry.is_object() && entry.contains("name")
                               ? entry.at("name").get<std::string>()
                               : fmt::format("layer{}", i);
        const std::string where = fmt::format("{}: layer '{}'", origin, name);
        json with_batch = entry;
        if (with_batch.is_object() && !with_batch.contains("batch")) with_batch["batch"] = default_batch;
        ConvSpec spec = parse_layer(with_batch, where);
        try {
          spec.validate();
        } catch (const Error& e) {
          fail(e.code(), fmt::format("{}: {}", where, e.what()));
        }
        if (!names.insert(name).second) {
          fail(ErrorCode::Config, fmt::format("{}: duplicate layer name '{}'", origin, name));
        }
        w.layers.push_back({std::move(name), spec});
      }
    }
    std::mt19937_64 rng(w.seed);
    for (int i = 0; i < random_layers; ++i) {
      std::string name = fmt::format("random{}", i);
      if (!names.insert(name).second) {
        fail(ErrorCode::Config, fmt::format("{}: duplicate layer name '{}'", origin, name));
      }
      w.layers.push_back({std::move(name), random_spec(rng)});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, fmt::format("{}: {}", origin, e.what()));
  }
  return w;
}

Workload load_workload(const std::filesystem::path& path) {
  return parse_workload(detail::read_file(path), path.string());
}

ConvSpec random_spec(std::mt19937_64& rng, const RandomSpecBounds& b) {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    ConvSpec s;
    s.batch = pick(1, b.max_batch);
    s.in_channels = b.in_channels[pick(0, static_cast<int>(b.in_channels.size()) - 1)];
    s.in_height = pick(1, b.max_in_size);
    s.in_width = pick(1, b.max_in_size);
    s.out_channels = pick(1, b.max_out_channels);
    s.filter_height = pick(1, b.max_filter);
    s.filter_width = pick(1, b.max_filter);
    s.stride_h = pick(1, b.max_stride);
    s.stride_w = pick(1, b.max_stride);
    s.pad_h = pick(0, b.max_pad);
    s.pad_w = pick(0, b.max_pad);
    s.dilation_h = pick(1, b.max_dilation);
    s.dilation_w = pick(1, b.max_dilation);
    if (s.out_height() >= 1 && s.out_width() >= 1) return s;
  }
}

Tensor random_ifmap(const ConvSpec& spec, std::mt19937_64& rng, int lo, int hi) {
  return random_tensor(ifmap_shape(spec), rng, lo, hi);
}

Tensor random_filters(const ConvSpec& spec, std::mt19937_64& rng, int lo, int hi) {
  return random_tensor(filter_shape(spec), rng, lo, hi);
}

}  // namespace im2colsim
