#include "mrsr/motion.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft2d {
 public:
  Fft2d(int h, int w) : h_(h), w_(w), wc_(w / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(h) * wc_);
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(h, w, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(h, w, spec_, real_, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::vector<std::complex<double>> forward(const std::vector<double>& in) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(forward_);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(h_) * wc_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {spec_[i][0], spec_[i][1]};
    return out;
  }
  std::vector<double> backward(const std::vector<std::complex<double>>& in) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      spec_[i][0] = in[i].real();
      spec_[i][1] = in[i].imag();
    }
    fftw_execute(backward_);
    return std::vector<double>(real_, real_ + static_cast<std::size_t>(h_) * w_);
  }

 private:
  int h_, w_, wc_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

std::vector<double> hann_windowed(const Frame& f) {
  const double m = sum(f) / static_cast<double>(f.size());
  std::vector<double> out(f.size());
  for (int r = 0; r < f.height(); ++r) {
    const double wr = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (r + 0.5) / f.height());
    for (int c = 0; c < f.width(); ++c) {
      const double wc = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (c + 0.5) / f.width());
      out[static_cast<std::size_t>(r) * f.width() + c] = (f(r, c) - m) * wr * wc;
    }
  }
  return out;
}

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

double parabolic_offset(double left, double centre, double right) {
  const double denom = left - 2.0 * centre + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

// Separable Gaussian with replicated borders.
Frame gaussian_blur(const Frame& f, double sigma) {
  if (sigma <= 0.0) return f;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) total += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= total;
  Frame tmp(f.height(), f.width());
  for (int r = 0; r < f.height(); ++r) {
    for (int c = 0; c < f.width(); ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * f(r, std::clamp(c + i, 0, f.width() - 1));
      tmp(r, c) = acc;
    }
  }
  Frame out(f.height(), f.width());
  for (int r = 0; r < f.height(); ++r) {
    for (int i = -radius; i <= radius; ++i) {
      const auto src = tmp.row(std::clamp(r + i, 0, f.height() - 1));
      auto dst = out.row(r);
      for (int c = 0; c < f.width(); ++c) dst[c] += k[i + radius] * src[c];
    }
  }
  return out;
}

struct FlowSystem {
  Frame gx, gy, c;  // residual(p) = c + gx u + gy v
};

double flow_energy(const FlowSystem& sys, const Frame& u, const Frame& v, double lambda) {
  double data = 0.0;
  double smooth = 0.0;
  const int h = u.height();
  const int w = u.width();
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      const double res = sys.c(r, col) + sys.gx(r, col) * u(r, col) + sys.gy(r, col) * v(r, col);
      data += res * res;
      if (col + 1 < w) {
        const double du = u(r, col + 1) - u(r, col);
        const double dv = v(r, col + 1) - v(r, col);
        smooth += du * du + dv * dv;
      }
      if (r + 1 < h) {
        const double du = u(r + 1, col) - u(r, col);
        const double dv = v(r + 1, col) - v(r, col);
        smooth += du * du + dv * dv;
      }
    }
  }
  return data + lambda * smooth;
}

// One red-black sweep; every pixel update is the exact minimiser of the
// energy over (u_p, v_p) with its neighbours fixed.
void red_black_sweep(const FlowSystem& sys, Frame& u, Frame& v, double lambda) {
  const int h = u.height();
  const int w = u.width();
  for (int colour = 0; colour < 2; ++colour) {
    for (int r = 0; r < h; ++r) {
      for (int col = (r + colour) % 2; col < w; col += 2) {
        double su = 0.0, sv = 0.0;
        int n = 0;
        if (r > 0) { su += u(r - 1, col); sv += v(r - 1, col); ++n; }
        if (r + 1 < h) { su += u(r + 1, col); sv += v(r + 1, col); ++n; }
        if (col > 0) { su += u(r, col - 1); sv += v(r, col - 1); ++n; }
        if (col + 1 < w) { su += u(r, col + 1); sv += v(r, col + 1); ++n; }
        const double gx = sys.gx(r, col);
        const double gy = sys.gy(r, col);
        const double cc = sys.c(r, col);
        const double ln = lambda * n;
        const double a11 = gx * gx + ln;
        const double a12 = gx * gy;
        const double a22 = gy * gy + ln;
        const double b1 = lambda * su - gx * cc;
        const double b2 = lambda * sv - gy * cc;
        const double det = a11 * a22 - a12 * a12;
        if (det <= 0.0) continue;
        u(r, col) = (a22 * b1 - a12 * b2) / det;
        v(r, col) = (a11 * b2 - a12 * b1) / det;
      }
    }
  }
}

FlowSystem linearise(const Frame& prev, const Frame& curr, const Frame& u, const Frame& v) {
  const Frame warped = warp(prev, DenseFlow{u, v});
  const int h = prev.height();
  const int w = prev.width();
  FlowSystem sys{Frame(h, w), Frame(h, w), Frame(h, w)};
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      // d/dw prev(p - w) = -grad prev(p - w); central differences, replicated edges.
      const double ix = 0.5 * (warped(r, std::min(col + 1, w - 1)) - warped(r, std::max(col - 1, 0)));
      const double iy = 0.5 * (warped(std::min(r + 1, h - 1), col) - warped(std::max(r - 1, 0), col));
      const double gx = -ix;
      const double gy = -iy;
      sys.gx(r, col) = gx;
      sys.gy(r, col) = gy;
      sys.c(r, col) = (warped(r, col) - curr(r, col)) - gx * u(r, col) - gy * v(r, col);
    }
  }
  return sys;
}

}  // namespace

void FlowParams::validate() const {
  if (!(lambda_smooth > 0.0)) throw ConfigError("flow: lambda_smooth must be positive");
  if (pyramid_levels < 1) throw ConfigError("flow: pyramid_levels must be >= 1");
  if (!(pyramid_spacing > 1.0)) throw ConfigError("flow: pyramid_spacing must be > 1");
  if (iterations_per_level < 1) throw ConfigError("flow: iterations_per_level must be >= 1");
}

GlobalShift estimate_global_shift(const Frame& prev, const Frame& curr) {
  if (!prev.same_shape(curr)) throw DimensionError("estimate_global_shift: frame dimensions differ");
  const int h = prev.height();
  const int w = prev.width();
  Fft2d fft(h, w);
  const auto fp = fft.forward(hann_windowed(prev));
  const auto fc = fft.forward(hann_windowed(curr));
  std::vector<std::complex<double>> cross(fp.size());
  for (std::size_t i = 0; i < cross.size(); ++i) {
    const auto x = fc[i] * std::conj(fp[i]);
    const double mag = std::abs(x);
    cross[i] = mag > 1e-12 ? x / mag : std::complex<double>(0.0, 0.0);
  }
  const std::vector<double> surface = fft.backward(cross);
  auto at = [&](int r, int c) { return surface[static_cast<std::size_t>(wrap(r, h)) * w + wrap(c, w)]; };

  int best_r = 0, best_c = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (at(r, c) > best) {
        best = at(r, c);
        best_r = r;
        best_c = c;
      }
    }
  }
  const double sub_r = parabolic_offset(at(best_r - 1, best_c), best, at(best_r + 1, best_c));
  const double sub_c = parabolic_offset(at(best_r, best_c - 1), best, at(best_r, best_c + 1));
  const int sr = best_r > h / 2 ? best_r - h : best_r;
  const int sc = best_c > w / 2 ? best_c - w : best_c;
  return GlobalShift{sc + sub_c, sr + sub_r};
}

DenseFlow estimate_dense_flow(const Frame& prev, const Frame& curr, const FlowParams& params,
                              std::vector<double>* finest_energy) {
  params.validate();
  if (!prev.same_shape(curr)) throw DimensionError("estimate_dense_flow: frame dimensions differ");
  const int min_size = 1 << (params.pyramid_levels - 1);
  if (prev.height() < min_size || prev.width() < min_size) {
    throw DimensionError("estimate_dense_flow: frame too small for a " + std::to_string(params.pyramid_levels) +
                         "-level pyramid");
  }

  std::vector<Frame> prev_pyr{prev};
  std::vector<Frame> curr_pyr{curr};
  const double sigma = 0.5 * std::sqrt(params.pyramid_spacing * params.pyramid_spacing - 1.0);
  for (int l = 1; l < params.pyramid_levels; ++l) {
    const double scale = std::pow(params.pyramid_spacing, l);
    const int h = std::max(1, static_cast<int>(std::lround(prev.height() / scale)));
    const int w = std::max(1, static_cast<int>(std::lround(prev.width() / scale)));
    prev_pyr.push_back(resize_bilinear(gaussian_blur(prev_pyr.back(), sigma), h, w));
    curr_pyr.push_back(resize_bilinear(gaussian_blur(curr_pyr.back(), sigma), h, w));
  }

  Frame u(prev_pyr.back().height(), prev_pyr.back().width());
  Frame v(u.height(), u.width());
  for (int l = params.pyramid_levels - 1; l >= 0; --l) {
    const Frame& p = prev_pyr[l];
    const Frame& c = curr_pyr[l];
    if (!u.same_shape(p)) {
      const double sy = static_cast<double>(p.height()) / u.height();
      const double sx = static_cast<double>(p.width()) / u.width();
      u = sx * resize_bilinear(u, p.height(), p.width());
      v = sy * resize_bilinear(v, p.height(), p.width());
    }
    const FlowSystem sys = linearise(p, c, u, v);
    const bool log = finest_energy != nullptr && l == 0;
    if (log) finest_energy->push_back(flow_energy(sys, u, v, params.lambda_smooth));
    for (int it = 0; it < params.iterations_per_level; ++it) {
      red_black_sweep(sys, u, v, params.lambda_smooth);
      if (log) finest_energy->push_back(flow_energy(sys, u, v, params.lambda_smooth));
    }
  }
  return DenseFlow{std::move(u), std::move(v)};
}

MotionEstimate upscale_motion(const MotionEstimate& motion, int d) {
  if (d < 1) throw InvalidArgument("upscale_motion: factor must be >= 1");
  if (const auto* shift = std::get_if<GlobalShift>(&motion)) {
    return GlobalShift{shift->dx * d, shift->dy * d};
  }
  const auto& flow = std::get<DenseFlow>(motion);
  if (d == 1) return flow;
  return DenseFlow{static_cast<double>(d) * bilinear_upscale(flow.u, d),
                   static_cast<double>(d) * bilinear_upscale(flow.v, d)};
}

}  // namespace mrsr
