#include <gtest/gtest.h>

#include <random>

#include "im2colsim/error.hpp"
#include "im2colsim/kernels.hpp"
#include "im2colsim/workload.hpp"
#include "oracles.hpp"

using namespace im2colsim;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

Tensor filled(Layout layout, Shape4 shape, float value) {
  Tensor t = Tensor::zeros(layout, shape);
  for (float& x : t.data()) x = value;
  return t;
}

}  // namespace

TEST(ConvSpec, OutputExtent) {
  ConvSpec s{2, 3, 7, 7, 4, 3, 3, 2, 2, 1, 1, 1, 1};
  EXPECT_EQ(s.out_height(), 4);
  EXPECT_EQ(s.out_width(), 4);
  EXPECT_EQ(s.gemm_m(), 2 * 16);
  EXPECT_EQ(s.gemm_k(), 27);
  EXPECT_EQ(s.macs(), 2 * 16 * 27 * 4);

  ConvSpec dilated{1, 1, 7, 7, 1, 3, 3, 1, 1, 0, 0, 2, 2};
  EXPECT_EQ(dilated.out_height(), 3);
}

TEST(ConvSpec, RejectsBadShapes) {
  ConvSpec zero{0, 1, 4, 4, 1, 1, 1, 1, 1, 0, 0, 1, 1};
  EXPECT_EQ(code_of([&] { zero.validate(); }), ErrorCode::Shape);
  ConvSpec too_big{1, 1, 2, 2, 1, 5, 5, 1, 1, 0, 0, 1, 1};
  EXPECT_EQ(code_of([&] { too_big.validate(); }), ErrorCode::Shape);
  ConvSpec neg_pad{1, 1, 4, 4, 1, 1, 1, 1, 1, -1, 0, 1, 1};
  EXPECT_EQ(code_of([&] { neg_pad.validate(); }), ErrorCode::Shape);
}

TEST(Tensor, DimsMustMatchData) {
  EXPECT_EQ(code_of([] { Tensor({2, 2, 2, 2}, Layout::NCHW, std::vector<float>(15)); }),
            ErrorCode::Shape);
  EXPECT_EQ(code_of([] { Tensor({2, 2}, Layout::NHWC, std::vector<float>(4)); }), ErrorCode::Shape);
}

TEST(Tensor, RelayoutRoundTrip) {
  std::mt19937_64 rng(3);
  const Shape4 shape{2, 3, 4, 5};
  Tensor t = Tensor::zeros(Layout::NCHW, shape);
  std::uniform_real_distribution<float> d(-1, 1);
  for (float& x : t.data()) x = d(rng);
  for (Layout a : {Layout::NHWC, Layout::HWCN}) {
    const Tensor moved = relayout(t, a);
    EXPECT_EQ(moved.shape(), shape);
    const Tensor back = relayout(moved, Layout::NCHW);
    EXPECT_EQ(back, t);
  }
  EXPECT_EQ(code_of([&] { relayout(t, Layout::RowMajorMatrix); }), ErrorCode::Shape);
}

TEST(Tensor, HwcnLinearization) {
  // HWCN: the batch index moves fastest, then channel, width, height.
  Tensor t = Tensor::zeros(Layout::HWCN, {2, 3, 4, 5});
  EXPECT_EQ(t.offset(1, 0, 0, 0), 1u);
  EXPECT_EQ(t.offset(0, 1, 0, 0), 2u);
  EXPECT_EQ(t.offset(0, 0, 0, 1), 6u);
  EXPECT_EQ(t.offset(0, 0, 1, 0), 30u);
}

TEST(DirectConv, SingleMac) {
  ConvSpec s{};
  Tensor x = filled(Layout::NHWC, {1, 1, 1, 1}, 3.0f);
  Tensor f = filled(Layout::NCHW, {1, 1, 1, 1}, 2.0f);
  const Tensor y = direct_conv(x, f, s);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y.data()[0], 6.0f);
}

TEST(DirectConv, SumOfOnes) {
  ConvSpec s{1, 1, 3, 3, 1, 3, 3, 1, 1, 0, 0, 1, 1};
  const Tensor y = direct_conv(filled(Layout::NHWC, {1, 1, 3, 3}, 1.0f),
                               filled(Layout::NCHW, {1, 1, 3, 3}, 1.0f), s);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y.data()[0], 9.0f);
}

TEST(DirectConv, MatchesBruteForce) {
  ConvSpec s{2, 3, 7, 7, 4, 3, 3, 2, 2, 1, 1, 1, 1};
  std::mt19937_64 rng(11);
  const Tensor x = relayout(random_ifmap(s, rng), Layout::NHWC);
  const Tensor f = random_filters(s, rng);
  const Tensor y = direct_conv(x, f, s);
  EXPECT_EQ(y.layout(), Layout::NHWC);
  EXPECT_EQ(oracle::raw_nchw(y), oracle::conv(oracle::raw_nchw(x), oracle::raw_nchw(f), s));
}

TEST(DirectConv, RandomSpecsMatchBruteForce) {
  std::mt19937_64 rng(5);
  RandomSpecBounds b;
  b.in_channels = {1, 2, 3, 8};
  for (int it = 0; it < 40; ++it) {
    const ConvSpec s = random_spec(rng, b);
    const Tensor x = random_ifmap(s, rng);
    const Tensor f = random_filters(s, rng);
    EXPECT_EQ(oracle::raw_nchw(direct_conv(x, f, s)),
              oracle::conv(oracle::raw_nchw(x), oracle::raw_nchw(f), s))
        << s.to_string();
  }
}

TEST(DirectConv, ShapeMismatch) {
  ConvSpec s{1, 2, 4, 4, 1, 3, 3, 1, 1, 0, 0, 1, 1};
  const Tensor x = Tensor::zeros(Layout::NHWC, {1, 3, 4, 4});
  const Tensor f = Tensor::zeros(Layout::NCHW, {1, 2, 3, 3});
  EXPECT_EQ(code_of([&] { direct_conv(x, f, s); }), ErrorCode::Shape);
}

TEST(Gemm, MatchesNaive) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> d(-4, 4);
  Tensor a = Tensor::matrix(5, 7), b = Tensor::matrix(7, 3);
  for (float& x : a.data()) x = static_cast<float>(d(rng));
  for (float& x : b.data()) x = static_cast<float>(d(rng));
  const Tensor c = gemm(a, b);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) {
      float acc = 0;
      for (int k = 0; k < 7; ++k) acc += a.data()[i * 7 + k] * b.data()[k * 3 + j];
      EXPECT_EQ(c.at(std::size_t(i), std::size_t(j)), acc);
    }
  EXPECT_EQ(code_of([&] { gemm(b, b); }), ErrorCode::Shape);
}

TEST(ArchConfig, ParseAndValidate) {
  const ArchConfig a = parse_arch_config(R"({"array_rows": 32, "array_cols": 16, "max_multi_tile": "auto"})");
  EXPECT_EQ(a.array_rows, 32);
  EXPECT_EQ(a.num_vector_memories, 32);
  EXPECT_EQ(a.max_multi_tile, 0);
  EXPECT_DOUBLE_EQ(ArchConfig{}.dram_bytes_per_cycle(), 1000.0);
  EXPECT_EQ(parse_arch_config(to_json(a)), a);
  EXPECT_EQ(code_of([] { parse_arch_config(R"({"array_rows": 0})"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_arch_config(R"({"bogus": 1})"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_arch_config("{\n\"array_rows\": ,}"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_arch_config(R"({"array_rows": 8, "num_vector_memories": 4})"); }),
            ErrorCode::Config);
}

TEST(ArchConfig, ParseErrorNamesLine) {
  try {
    parse_arch_config("{\n  \"array_rows\": 4,\n  oops\n}", "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("cfg.json:3"), std::string::npos) << e.what();
  }
}

TEST(Workload, ParsesShorthandsAndDefaults) {
  const Workload w = parse_workload(R"({
    "model": "m", "batch": 4, "methods": ["cf", "Explicit"],
    "layers": [{"name": "a", "in_channels": 3, "in_size": 8, "out_channels": 2,
                "filter": 3, "stride": 2, "pad": 1}]})");
  ASSERT_EQ(w.layers.size(), 1u);
  const ConvSpec& s = w.layers[0].spec;
  EXPECT_EQ(s.batch, 4);
  EXPECT_EQ(s.in_height, 8);
  EXPECT_EQ(s.in_width, 8);
  EXPECT_EQ(s.stride_w, 2);
  EXPECT_EQ(s.pad_h, 1);
  ASSERT_EQ(w.methods.size(), 2u);
  EXPECT_EQ(w.methods[1], Method::ExplicitIm2col);
}

TEST(Workload, RejectsDuplicatesAndBadLayers) {
  EXPECT_EQ(code_of([] {
              parse_workload(R"({"layers": [{"name": "a"}, {"name": "a"}]})");
            }),
            ErrorCode::Config);
  EXPECT_EQ(code_of([] {
              parse_workload(R"({"layers": [{"name": "a", "in_size": 2, "filter": 5}]})");
            }),
            ErrorCode::Shape);
}

TEST(Workload, RandomLayersAreReproducible) {
  const Workload a = parse_workload(R"({"seed": 9, "random_layers": 5})");
  const Workload b = parse_workload(R"({"seed": 9, "random_layers": 5})");
  ASSERT_EQ(a.layers.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a.layers[i].spec, b.layers[i].spec);
}
