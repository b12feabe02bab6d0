#pragma once

#include <array>
#include <span>
#include <vector>

#include "mrsr/frame.hpp"

namespace mrsr {

enum class WaveletMode {
  Decimated,
  // Undecimated (a trous) transform with shift-averaged synthesis; this is
  // complete cycle spinning of the decimated transform over all shifts.
  CycleSpinning,
};

// p = 1 soft, p = 0 hard.
enum class ThresholdKind { Hard = 0, Soft = 1 };

// How the hard threshold compares a coefficient with lambda_tau.
enum class HardRule {
  Magnitude,  // keep c when |c| >= lambda_tau
  Literal,    // keep c when c >= lambda_tau (discards every negative c)
};

// Daubechies, 5 vanishing moments, periodic boundary.
struct WaveletPlan {
  int levels = 4;
  WaveletMode mode = WaveletMode::CycleSpinning;
};

// Orthonormal db5 analysis low-pass filter (10 taps, sums to sqrt(2)).
std::span<const double> db5_lowpass();
// Quadrature mirror high-pass g[k] = (-1)^k h[L - 1 - k].
std::span<const double> db5_highpass();

struct WaveletLevel {
  // Detail bands: low-pass rows / high-pass columns, high/low, high/high.
  std::array<Frame, 3> bands;
};

// Coefficients of one frame. Decimated: each level halves the size.
// CycleSpinning: every band is full size and coefficients sit on the same
// scale as the decimated transform, so
//   sum_q 4^-q |detail_q|^2 + 4^-Q |approx|^2 = |x|^2.
struct WaveletCoeffs {
  WaveletMode mode = WaveletMode::Decimated;
  std::vector<WaveletLevel> details;  // details[0] is the finest level
  Frame approximation;
  int height = 0;
  int width = 0;

  int levels() const noexcept { return static_cast<int>(details.size()); }
  // Plain sum of squares over every stored coefficient.
  double energy() const;
  // The weighted energy above; equals |x|^2 in both modes.
  double weighted_energy() const;
};

WaveletCoeffs dwt_forward(const Frame& frame, const WaveletPlan& plan);
Frame dwt_inverse(const WaveletCoeffs& coeffs, const WaveletPlan& plan);

void threshold_values(std::span<double> values, ThresholdKind kind, double lambda_tau,
                      HardRule rule = HardRule::Magnitude);

// Thresholds the detail bands; the approximation band passes through.
WaveletCoeffs threshold(WaveletCoeffs coeffs, ThresholdKind kind, double lambda_tau,
                        HardRule rule = HardRule::Magnitude);

// dwt_inverse(threshold(dwt_forward(frame))).
Frame project_omega2(const Frame& frame, const WaveletPlan& plan, ThresholdKind kind, double lambda_tau,
                     HardRule rule = HardRule::Magnitude);

}  // namespace mrsr
