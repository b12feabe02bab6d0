#include <gtest/gtest.h>

#include "mrsr/errors.hpp"
#include "mrsr/motion.hpp"
#include "mrsr/synthetic.hpp"
#include "test_util.hpp"

using namespace mrsr;
using namespace mrsr::testing;

namespace {

Frame textured(int size, std::uint64_t seed) { return procedural_source(size, seed); }

Frame crop(const Frame& f, int top, int left, int h, int w) {
  Frame out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out(r, c) = f(top + r, left + c);
  }
  return out;
}

}  // namespace

TEST(GlobalShift, IdenticalFrames) {
  const Frame f = textured(64, 1);
  const GlobalShift s = estimate_global_shift(f, f);
  EXPECT_NEAR(s.dx, 0.0, 1e-9);
  EXPECT_NEAR(s.dy, 0.0, 1e-9);
}

TEST(GlobalShift, CircularOnePixel) {
  const Frame f = textured(64, 2);
  const GlobalShift s = estimate_global_shift(f, circular_shift(f, 0, 1));
  EXPECT_NEAR(s.dx, 1.0, 0.05);
  EXPECT_NEAR(s.dy, 0.0, 0.05);
  const GlobalShift t = estimate_global_shift(f, circular_shift(f, -3, 2));
  EXPECT_NEAR(t.dx, 2.0, 0.05);
  EXPECT_NEAR(t.dy, -3.0, 0.05);
}

TEST(GlobalShift, NoisyWindowsRecoverIntegerShift) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, std::sqrt(10.0));
  std::uniform_int_distribution<int> step(-3, 3);
  const Frame src = textured(160, 3);
  int successes = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int dy = step(rng), dx = step(rng);
    Frame a = crop(src, 16, 16, 128, 128);
    Frame b = crop(src, 16 - dy, 16 - dx, 128, 128);
    for (double& v : a.values()) v += noise(rng);
    for (double& v : b.values()) v += noise(rng);
    const GlobalShift s = estimate_global_shift(a, b);
    successes += (std::lround(s.dx) == dx && std::lround(s.dy) == dy) ? 1 : 0;
  }
  EXPECT_GE(successes, 19);
}

TEST(GlobalShift, Antisymmetric) {
  const Frame src = textured(160, 4);
  const Frame a = crop(src, 20, 20, 128, 128);
  const Frame b = crop(src, 21, 18, 128, 128);
  const GlobalShift ab = estimate_global_shift(a, b);
  const GlobalShift ba = estimate_global_shift(b, a);
  EXPECT_NEAR(ab.dx, -ba.dx, 0.1);
  EXPECT_NEAR(ab.dy, -ba.dy, 0.1);
}

TEST(GlobalShift, RejectsMismatchedFrames) {
  EXPECT_THROW(estimate_global_shift(Frame(16, 16), Frame(16, 8)), DimensionError);
}

TEST(DenseFlow, IdenticalFramesGiveZeroFlow) {
  const Frame f = textured(64, 5);
  const DenseFlow flow = estimate_dense_flow(f, f, FlowParams{});
  EXPECT_LT(norm2(flow.u), 1e-9);
  EXPECT_LT(norm2(flow.v), 1e-9);
}

TEST(DenseFlow, OnePixelTranslation) {
  const Frame src = textured(96, 6);
  const Frame prev = crop(src, 8, 8, 80, 80);
  const Frame curr = crop(src, 8, 7, 80, 80);  // content moves right by one pixel
  const DenseFlow flow = estimate_dense_flow(prev, curr, FlowParams{});
  double u = 0.0, v = 0.0;
  int n = 0;
  for (int r = 8; r < 72; ++r) {
    for (int c = 8; c < 72; ++c) {
      u += flow.u(r, c);
      v += flow.v(r, c);
      ++n;
    }
  }
  EXPECT_NEAR(u / n, 1.0, 0.1);
  EXPECT_NEAR(v / n, 0.0, 0.1);
}

TEST(DenseFlow, EnergyNonIncreasingAtFinestLevel) {
  const Frame src = textured(96, 7);
  const Frame prev = crop(src, 8, 8, 64, 64);
  const Frame curr = crop(src, 9, 7, 64, 64);
  std::vector<double> energy;
  estimate_dense_flow(prev, curr, FlowParams{}, &energy);
  ASSERT_GT(energy.size(), 1u);
  for (std::size_t k = 1; k < energy.size(); ++k) EXPECT_LE(energy[k], energy[k - 1] * (1.0 + 1e-12)) << k;
}

TEST(DenseFlow, InvalidParams) {
  FlowParams p;
  p.pyramid_spacing = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = FlowParams{};
  p.iterations_per_level = 0;
  EXPECT_THROW(estimate_dense_flow(Frame(16, 16), Frame(16, 16), p), ConfigError);
}

TEST(UpscaleMotion, ScalesBothModels) {
  const auto g = std::get<GlobalShift>(upscale_motion(GlobalShift{1.0, -2.0}, 2));
  EXPECT_EQ(g.dx, 2.0);
  EXPECT_EQ(g.dy, -4.0);
  const auto same = std::get<GlobalShift>(upscale_motion(GlobalShift{0.3, 0.7}, 1));
  EXPECT_EQ(same.dx, 0.3);
  const DenseFlow lr{Frame(4, 4, 0.5), Frame(4, 4, -0.25)};
  const auto hr = std::get<DenseFlow>(upscale_motion(lr, 2));
  ASSERT_EQ(hr.u.height(), 8);
  EXPECT_LT(max_abs_diff(hr.u, Frame(8, 8, 1.0)), 1e-12);
  EXPECT_LT(max_abs_diff(hr.v, Frame(8, 8, -0.5)), 1e-12);
}
