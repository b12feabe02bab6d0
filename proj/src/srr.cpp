#include "mrsr/srr.hpp"

#include <algorithm>

#include "mrsr/errors.hpp"
#include "mrsr/imaging.hpp"

namespace mrsr {

namespace {

Frame blur_decimate(const Frame& x, const SrrParams& p) { return decimate(conv2d(x, p.h), DecimationSpec(p.d)); }

Frame upsample_adjoint_blur(const Frame& y, const SrrParams& p) {
  return adjoint_conv2d(upsample_zero(y, DecimationSpec(p.d)), p.h);
}

Frame laplacian_normal(const Frame& x, const SrrParams& p) { return adjoint_conv2d(conv2d(x, p.s), p.s); }

void require_lr_hr(const Frame& y, const Frame& hr, int d, const char* what) {
  if (y.height() * d != hr.height() || y.width() * d != hr.width()) {
    throw DimensionError(std::string(what) + ": observation is not 1/" + std::to_string(d) +
                         " of the HR frame size");
  }
}

const FilterbankRecord& require_record(const SrrState& state, Lambda1 lambda1) {
  const FilterbankRecord* rec = state.cache.find(lambda1);
  if (rec == nullptr) {
    throw MissingDesignError("no inverse filterbank designed for lambda1 = " +
                             (lambda1.is_infinite() ? std::string("inf") : std::to_string(lambda1.value())));
  }
  return *rec;
}

void advance(SrrState& state, const Frame& y, Frame estimate) {
  state.prev_estimate = std::move(estimate);
  state.prev_observation = y;
  ++state.frame_index;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Bicubic: return "bicubic";
    case Method::Ltsr: return "ltsr";
    case Method::Mtsr: return "mtsr";
    case Method::Wmtsr: return "wmtsr";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "bicubic") return Method::Bicubic;
  if (name == "ltsr") return Method::Ltsr;
  if (name == "mtsr") return Method::Mtsr;
  if (name == "wmtsr") return Method::Wmtsr;
  throw ConfigError("unknown method '" + name + "' (expected bicubic|ltsr|mtsr|wmtsr)");
}

std::vector<Lambda1> default_schedule(int J) {
  std::vector<Lambda1> out;
  for (int j = 0; j < J; ++j) out.push_back(j == 0 ? Lambda1::infinity() : Lambda1(1.0));
  return out;
}

SrrParams SrrParams::defaults_for(Method m) {
  SrrParams p;
  switch (m) {
    case Method::Ltsr:
      p.mu = 3.4;
      p.alpha = 1e-4;
      p.alphaT = 0.017;
      p.J_baseline = 2;
      break;
    case Method::Mtsr:
      p.alpha = 0.005;
      p.alphaT = 0.015;
      break;
    case Method::Wmtsr:
    case Method::Bicubic:
      p.alpha = 0.0;
      p.alphaT = 0.015;
      p.J = 1;
      p.lambda_tau = 10.0;
      p.p = ThresholdKind::Hard;
      p.lambda1_schedule = {Lambda1::infinity()};
      break;
  }
  return p;
}

void SrrParams::validate() const {
  if (d < 1) throw ConfigError("scale factor must be >= 1");
  if (alpha < 0.0 || alphaT < 0.0 || lambda_tau < 0.0 || mu < 0.0) {
    throw ConfigError("weights (alpha, alphaT, lambda_tau, mu) must be non-negative");
  }
  if (J < 1 || J_baseline < 0) throw ConfigError("iteration counts must be positive");
  if (static_cast<int>(lambda1_schedule.size()) != J) {
    throw ConfigError("lambda1 schedule length (" + std::to_string(lambda1_schedule.size()) +
                      ") must equal J (" + std::to_string(J) + ")");
  }
  for (std::size_t j = 1; j < lambda1_schedule.size(); ++j) {
    const Lambda1& a = lambda1_schedule[j - 1];
    const Lambda1& b = lambda1_schedule[j];
    const bool increasing = a.is_infinite() ? false : (b.is_infinite() || b.value() > a.value());
    if (increasing) throw ConfigError("lambda1 schedule must be non-increasing");
  }
  if (tap_radius < 1) throw ConfigError("tap_radius must be >= 1");
  flow.validate();
}

DesignSpec design_spec_for(Method m, const SrrParams& params) {
  DesignSpec spec;
  spec.tap_radius = params.tap_radius;
  spec.h = params.h;
  spec.s = params.s;
  spec.d = params.d;
  spec.ridge = params.ridge;
  if (m == Method::Mtsr) {
    spec.alphaT = params.alpha + params.alphaT;
    spec.lambda1_values = {Lambda1::infinity()};
  } else {
    spec.alphaT = params.alphaT;
    spec.lambda1_values.clear();
    for (const Lambda1& l : params.lambda1_schedule) {
      if (std::find(spec.lambda1_values.begin(), spec.lambda1_values.end(), l) == spec.lambda1_values.end()) {
        spec.lambda1_values.push_back(l);
      }
    }
  }
  return spec;
}

Frame compute_rhs(const Frame& y, const Frame& warped_prev, Lambda1 lambda1, double alphaT, const Frame* prev_iterate,
                  const SrrParams& params) {
  require_lr_hr(y, warped_prev, params.d, "compute_rhs");
  Frame rhs = upsample_adjoint_blur(y, params);
  rhs.axpy(alphaT, laplacian_normal(warped_prev, params));
  if (lambda1.is_infinite()) return rhs;
  if (prev_iterate == nullptr) throw InvalidArgument("compute_rhs: finite lambda1 needs the previous iterate");
  rhs *= lambda1.value();
  rhs += *prev_iterate;
  return rhs;
}

double data_misfit(const Frame& x, const Frame& y, const SrrParams& params) {
  const Frame r = y - blur_decimate(x, params);
  return dot(r, r);
}

Frame mtsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion) {
  const SrrParams& p = state.params;
  const Frame warped = warp(state.prev_estimate, motion);
  const FilterbankRecord& rec = require_record(state, Lambda1::infinity());
  Frame x = apply_polyphase(rec.inverse, compute_rhs(y, warped, Lambda1::infinity(), p.alphaT, nullptr, p));
  advance(state, y, x);
  return x;
}

Frame wmtsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion, std::vector<double>* data_misfit_log) {
  const SrrParams& p = state.params;
  const Frame warped = warp(state.prev_estimate, motion);
  Frame x = warped;
  for (int j = 0; j < p.J; ++j) {
    const Lambda1 lambda = p.lambda1_schedule[j];
    const FilterbankRecord& rec = require_record(state, lambda);
    const Frame z = apply_polyphase(rec.inverse, compute_rhs(y, warped, lambda, p.alphaT, &x, p));
    x = project_omega2(z, p.wavelet, p.p, p.lambda_tau, p.hard_rule);
    if (data_misfit_log != nullptr) data_misfit_log->push_back(data_misfit(x, y, p));
  }
  advance(state, y, x);
  return x;
}

double ltsr_cost(const Frame& x, const Frame& y, const Frame& warped_prev, const SrrParams& params) {
  const Frame sx = conv2d(x, params.s);
  const Frame sd = conv2d(x - warped_prev, params.s);
  return data_misfit(x, y, params) + params.alpha * dot(sx, sx) + params.alphaT * dot(sd, sd);
}

Frame ltsr_gradient(const Frame& x, const Frame& y, const Frame& warped_prev, const SrrParams& params) {
  Frame g = upsample_adjoint_blur(blur_decimate(x, params) - y, params);
  g.axpy(params.alpha, laplacian_normal(x, params));
  g.axpy(params.alphaT, laplacian_normal(x - warped_prev, params));
  g *= 2.0;
  return g;
}

Frame ltsr_step(SrrState& state, const Frame& y, const MotionEstimate& motion) {
  const SrrParams& p = state.params;
  const Frame warped = warp(state.prev_estimate, motion);
  require_lr_hr(y, warped, p.d, "ltsr_step");
  Frame x = warped;
  // LMS convention: x += mu [H'D'(y - DHx) - ...], i.e. a step of mu / 2
  // along the gradient of L_T.
  for (int it = 0; it < p.J_baseline; ++it) x.axpy(-0.5 * p.mu, ltsr_gradient(x, y, warped, p));
  advance(state, y, x);
  return x;
}

SrrEngine::SrrEngine(Method method, SrrParams params, std::optional<InverseFilterbankCache> cache) {
  params.validate();
  state_.method = method;
  state_.params = std::move(params);
  if (method == Method::Mtsr || method == Method::Wmtsr) {
    const DesignSpec spec = design_spec_for(method, state_.params);
    if (cache) {
      if (cache->design_spec_hash() != design_spec_hash(spec)) {
        throw CacheStaleError("filterbank cache does not match the " + to_string(method) + " configuration");
      }
      state_.cache = std::move(*cache);
    } else {
      state_.cache = design_filterbank(spec);
    }
  }
}

const Frame& SrrEngine::process(const Frame& y) {
  if (state_.frame_index == 0 || state_.method == Method::Bicubic) {
    return process(y, GlobalShift{});
  }
  MotionEstimate lr_motion;
  if (state_.params.motion == MotionModel::GlobalShift) {
    lr_motion = estimate_global_shift(state_.prev_observation, y);
  } else {
    lr_motion = estimate_dense_flow(state_.prev_observation, y, state_.params.flow);
  }
  return process(y, upscale_motion(lr_motion, state_.params.d));
}

const Frame& SrrEngine::process(const Frame& y, const MotionEstimate& hr_motion) {
  if (state_.frame_index == 0 || state_.method == Method::Bicubic) {
    advance(state_, y, bicubic_upscale(y, state_.params.d));
    return state_.prev_estimate;
  }
  switch (state_.method) {
    case Method::Ltsr: ltsr_step(state_, y, hr_motion); break;
    case Method::Mtsr: mtsr_step(state_, y, hr_motion); break;
    case Method::Wmtsr: wmtsr_step(state_, y, hr_motion); break;
    case Method::Bicubic: break;
  }
  return state_.prev_estimate;
}

}  // namespace mrsr
