#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrsr/inverse_design.hpp"
#include "mrsr/motion.hpp"
#include "mrsr/wavelet.hpp"

namespace mrsr {

enum class Method { Bicubic, Ltsr, Mtsr, Wmtsr };

std::string to_string(Method m);
Method parse_method(const std::string& name);

enum class MotionModel { GlobalShift, DenseFlow };

// lambda1(1) = infinity, lambda1(j) = 1 for j >= 2.
std::vector<Lambda1> default_schedule(int J);

struct SrrParams {
  int d = 2;
  double alpha = 0.0;   // Tikhonov weight (Mtsr, Ltsr)
  double alphaT = 0.015;
  double lambda_tau = 10.0;
  ThresholdKind p = ThresholdKind::Hard;
  HardRule hard_rule = HardRule::Magnitude;
  int J = 1;
  std::vector<Lambda1> lambda1_schedule{Lambda1::infinity()};
  double mu = 3.4;
  int J_baseline = 2;

  Kernel2D h = uniform_blur_kernel(3);
  Kernel2D s = laplacian_kernel();
  int tap_radius = 7;
  double ridge = kDefaultDesignRidge;
  WaveletPlan wavelet{};

  MotionModel motion = MotionModel::GlobalShift;
  FlowParams flow{};

  // Published parameter values for the given method.
  static SrrParams defaults_for(Method m);
  void validate() const;
};

// Filterbank configuration each solver needs: A = H'D'DH + (alpha + alphaT) S'S
// for Mtsr, and lambda1-weighted systems with alphaT for Wmtsr.
DesignSpec design_spec_for(Method m, const SrrParams& params);

struct SrrState {
  Method method = Method::Wmtsr;
  SrrParams params;
  Frame prev_estimate;
  Frame prev_observation;
  int frame_index = 0;  // number of frames processed so far
  InverseFilterbankCache cache;
};

// Right-hand side of the data-fidelity projection.
//   finite lambda1: prev_iterate + lambda1 H'D'y + lambda1 alphaT S'S warped_prev
//   infinity:       H'D'y + alphaT S'S warped_prev (prev_iterate is not read)
Frame compute_rhs(const Frame& y, const Frame& warped_prev, Lambda1 lambda1, double alphaT, const Frame* prev_iterate,
                  const SrrParams& params);

// Per-frame steps. `motion` lives on the HR grid. Each advances the state.
Frame mtsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion);
// `data_misfit`, when given, receives |y - DH x_j|^2 after each iteration j.
Frame wmtsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion,
                 std::vector<double>* data_misfit = nullptr);
Frame ltsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion);

// Baseline cost L_T(x) and its gradient.
double ltsr_cost(const Frame& x, const Frame& y, const Frame& warped_prev, const SrrParams& params);
Frame ltsr_gradient(const Frame& x, const Frame& y, const Frame& warped_prev, const SrrParams& params);

// |y - D H x|^2
double data_misfit(const Frame& x, const Frame& y, const SrrParams& params);

// Online driver: bicubic start, motion estimation between consecutive
// observations, then the chosen method's step.
class SrrEngine {
 public:
  // Designs the needed filterbanks when `cache` is empty; otherwise checks
  // the cache against the parameters (CacheStaleError on mismatch).
  SrrEngine(Method method, SrrParams params, std::optional<InverseFilterbankCache> cache = std::nullopt);

  const Frame& process(const Frame& y);
  // Same, with a caller-provided HR-grid motion instead of estimation.
  const Frame& process(const Frame& y, const MotionEstimate& hr_motion);

  const SrrState& state() const noexcept { return state_; }
  SrrState& state() noexcept { return state_; }
  Method method() const noexcept { return state_.method; }

 private:
  SrrState state_;
};

}  // namespace mrsr
