#include <gtest/gtest.h>

#include <numeric>

#include "mrsr/errors.hpp"
#include "mrsr/wavelet.hpp"
#include "test_util.hpp"

using namespace mrsr;
using namespace mrsr::testing;

namespace {

const WaveletPlan kDecimated{4, WaveletMode::Decimated};
const WaveletPlan kSpinning{4, WaveletMode::CycleSpinning};

}  // namespace

TEST(Db5, FilterIdentities) {
  const auto h = db5_lowpass();
  const auto g = db5_highpass();
  ASSERT_EQ(h.size(), 10u);
  EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 0.0, 1e-14);
  // Orthonormal under even shifts.
  for (int shift = 0; shift < 10; shift += 2) {
    double hh = 0.0, hg = 0.0;
    for (int k = 0; k + shift < 10; ++k) {
      hh += h[k] * h[k + shift];
      hg += h[k] * g[k + shift];
    }
    EXPECT_NEAR(hh, shift == 0 ? 1.0 : 0.0, 1e-14) << shift;
    EXPECT_NEAR(hg, 0.0, 1e-14) << shift;
  }
  // Five vanishing moments.
  for (int m = 0; m < 5; ++m) {
    double moment = 0.0;
    for (int k = 0; k < 10; ++k) moment += std::pow(k, m) * g[k];
    EXPECT_NEAR(moment, 0.0, 1e-9 * std::pow(10.0, m)) << m;
  }
}

TEST(Dwt, ZeroFrame) {
  for (const auto& plan : {kDecimated, kSpinning}) {
    const WaveletCoeffs c = dwt_forward(Frame(32, 32), plan);
    EXPECT_EQ(c.energy(), 0.0);
    EXPECT_EQ(c.levels(), 4);
  }
}

TEST(Dwt, PerfectReconstructionBothModes) {
  std::mt19937_64 rng(1);
  const Frame f = random_frame(64, 64, rng);
  for (const auto& plan : {kDecimated, kSpinning}) {
    const Frame back = dwt_inverse(dwt_forward(f, plan), plan);
    EXPECT_LT(max_abs_diff(back, f), 1e-10);
  }
}

TEST(Dwt, NonSquareReconstruction) {
  std::mt19937_64 rng(2);
  const Frame f = random_frame(48, 80, rng);
  for (const auto& plan : {kDecimated, kSpinning}) {
    EXPECT_LT(max_abs_diff(dwt_inverse(dwt_forward(f, plan), plan), f), 1e-10);
  }
}

TEST(Dwt, ParsevalDecimated) {
  std::mt19937_64 rng(3);
  const Frame f = random_frame(64, 64, rng);
  const WaveletCoeffs c = dwt_forward(f, kDecimated);
  EXPECT_NEAR(std::sqrt(c.energy()), norm2(f), 1e-10 * norm2(f));
  EXPECT_EQ(c.details[0].bands[0].height(), 32);
  EXPECT_EQ(c.approximation.height(), 4);
}

TEST(Dwt, WeightedEnergyCycleSpinning) {
  std::mt19937_64 rng(4);
  const Frame f = random_frame(64, 64, rng);
  const WaveletCoeffs c = dwt_forward(f, kSpinning);
  EXPECT_NEAR(c.weighted_energy(), dot(f, f), 1e-10 * dot(f, f));
}

TEST(Dwt, CycleSpinningIsShiftEquivariant) {
  std::mt19937_64 rng(5);
  const Frame f = random_frame(64, 64, rng);
  const WaveletCoeffs a = dwt_forward(circular_shift(f, 3, -5), kSpinning);
  const WaveletCoeffs b = dwt_forward(f, kSpinning);
  for (int q = 0; q < 4; ++q) {
    for (int band = 0; band < 3; ++band) {
      EXPECT_LT(max_abs_diff(a.details[q].bands[band], circular_shift(b.details[q].bands[band], 3, -5)), 1e-10);
    }
  }
  EXPECT_LT(max_abs_diff(a.approximation, circular_shift(b.approximation, 3, -5)), 1e-10);
  const WaveletPlan plan = kSpinning;
  const Frame pa = project_omega2(circular_shift(f, 3, -5), plan, ThresholdKind::Hard, 20.0);
  const Frame pb = circular_shift(project_omega2(f, plan, ThresholdKind::Hard, 20.0), 3, -5);
  EXPECT_LT(max_abs_diff(pa, pb), 1e-10);
}

TEST(Dwt, CycleSpinningAveragesDecimatedShifts) {
  // One level: undecimated synthesis equals the mean over the four shifts of
  // decimated thresholding.
  std::mt19937_64 rng(6);
  const Frame f = random_frame(32, 32, rng);
  const WaveletPlan one_cs{1, WaveletMode::CycleSpinning};
  const WaveletPlan one_dec{1, WaveletMode::Decimated};
  Frame mean(32, 32);
  for (int dr = 0; dr < 2; ++dr) {
    for (int dc = 0; dc < 2; ++dc) {
      const Frame shifted = circular_shift(f, -dr, -dc);
      mean.axpy(0.25, circular_shift(project_omega2(shifted, one_dec, ThresholdKind::Soft, 15.0), dr, dc));
    }
  }
  EXPECT_LT(max_abs_diff(project_omega2(f, one_cs, ThresholdKind::Soft, 15.0), mean), 1e-10);
}

TEST(Dwt, RejectsBadInput) {
  EXPECT_THROW(dwt_forward(Frame(40, 64), kDecimated), DimensionError);
  const WaveletCoeffs c = dwt_forward(Frame(32, 32), kDecimated);
  EXPECT_THROW(dwt_inverse(c, kSpinning), InvalidArgument);
  EXPECT_THROW(dwt_forward(Frame(32, 32), WaveletPlan{0, WaveletMode::Decimated}), InvalidArgument);
}

TEST(Threshold, ClosedForms) {
  std::vector<double> soft{3.0, -2.0, 0.5};
  threshold_values(soft, ThresholdKind::Soft, 1.0);
  EXPECT_EQ(soft, (std::vector<double>{2.0, -1.0, 0.0}));

  std::vector<double> literal{3.0, -2.0, 0.5};
  threshold_values(literal, ThresholdKind::Hard, 1.0, HardRule::Literal);
  EXPECT_EQ(literal, (std::vector<double>{3.0, 0.0, 0.0}));

  std::vector<double> magnitude{3.0, -2.0, 0.5, -1.0};
  threshold_values(magnitude, ThresholdKind::Hard, 1.0, HardRule::Magnitude);
  EXPECT_EQ(magnitude, (std::vector<double>{3.0, -2.0, 0.0, -1.0}));

  for (auto kind : {ThresholdKind::Soft, ThresholdKind::Hard}) {
    std::vector<double> v{3.0, -2.0, 0.5};
    threshold_values(v, kind, 0.0);
    EXPECT_EQ(v, (std::vector<double>{3.0, -2.0, 0.5}));
  }
  std::vector<double> v{1.0};
  EXPECT_THROW(threshold_values(v, ThresholdKind::Soft, -1.0), InvalidArgument);
}

TEST(Threshold, ApproximationPassesThrough) {
  std::mt19937_64 rng(7);
  const WaveletCoeffs c = dwt_forward(random_frame(32, 32, rng), kDecimated);
  const WaveletCoeffs t = threshold(c, ThresholdKind::Hard, 1e9);
  EXPECT_EQ(t.approximation, c.approximation);
  EXPECT_EQ(t.details[2].bands[1], Frame(4, 4, 0.0));
}

TEST(ProjectOmega2, ZeroThresholdIsIdentity) {
  std::mt19937_64 rng(8);
  const Frame f = random_frame(64, 64, rng);
  for (const auto& plan : {kDecimated, kSpinning}) {
    for (auto kind : {ThresholdKind::Soft, ThresholdKind::Hard}) {
      EXPECT_LT(max_abs_diff(project_omega2(f, plan, kind, 0.0), f), 1e-10);
    }
  }
}

TEST(ProjectOmega2, HardDecimatedIsIdempotentAndShrinks) {
  std::mt19937_64 rng(9);
  const Frame f = random_frame(64, 64, rng);
  const Frame once = project_omega2(f, kDecimated, ThresholdKind::Hard, 40.0);
  const Frame twice = project_omega2(once, kDecimated, ThresholdKind::Hard, 40.0);
  EXPECT_LT(max_abs_diff(once, twice), 1e-10);
  EXPECT_LE(norm2(once), norm2(f));
  EXPECT_LE(norm2(project_omega2(f, kDecimated, ThresholdKind::Soft, 40.0)), norm2(f));
}
