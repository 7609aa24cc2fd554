#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "im2colsim/simulator.hpp"
#include "im2colsim/sweep.hpp"

namespace im2colsim {

/// A named list of layers plus run settings.
///
/// JSON keys: "model", "elem_bytes" (footprint accounting, default 2),
/// "batch" (default for layers), "methods", "seed", "random_layers" (append
/// that many randomized layers drawn from `seed`), and "layers": objects with
/// "name" and the ConvSpec fields. Shorthands: "in_size", "filter", "stride",
/// "pad", "dilation" set both the height and width variants.
struct Workload {
  std::string model;
  int elem_bytes = 2;
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  std::vector<NamedSpec> layers;
};

Workload parse_workload(const std::string& text, const std::string& origin = "<string>");
Workload load_workload(const std::filesystem::path& path);

/// Bounds for randomized layers; defaults match the functional test sweep.
struct RandomSpecBounds {
  int max_batch = 8;
  std::vector<int> in_channels{1, 2, 3, 8, 16, 128};
  int max_in_size = 16;
  int max_out_channels = 16;
  int max_filter = 5;
  int max_stride = 4;
  int max_pad = 2;
  int max_dilation = 2;
};

/// Draws until the layer is valid (non-empty output).
ConvSpec random_spec(std::mt19937_64& rng, const RandomSpecBounds& bounds = {});

/// Small-integer tensors for exact comparisons.
Tensor random_ifmap(const ConvSpec& spec, std::mt19937_64& rng, int lo = -3, int hi = 3);
Tensor random_filters(const ConvSpec& spec, std::mt19937_64& rng, int lo = -3, int hi = 3);

}  // namespace im2colsim
