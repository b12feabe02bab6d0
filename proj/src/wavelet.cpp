#include "mrsr/wavelet.hpp"

#include <cmath>
#include <string>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

constexpr std::array<double, 10> kDb5Low = {
    0.16010239797419293,  0.6038292697971896,   0.7243085284377729,    0.13842814590132074,
    -0.24229488706638203, -0.032244869584638375, 0.07757149384004572,   -0.006241490212798274,
    -0.012580751999081999, 0.0033357252854737712,
};

constexpr std::array<double, 10> make_highpass() {
  std::array<double, 10> g{};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = kDb5Low[g.size() - 1 - k];
    g[k] = (k % 2 == 0) ? v : -v;
  }
  return g;
}

constexpr std::array<double, 10> kDb5High = make_highpass();

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

// dst[n] += w * src[(n + shift) mod n_len], two contiguous segments.
void add_shifted(double* dst, const double* src, int len, int shift, double w) {
  shift = wrap(shift, len);
  const int first = len - shift;
  for (int n = 0; n < first; ++n) dst[n] += w * src[n + shift];
  for (int n = first; n < len; ++n) dst[n] += w * src[n + shift - len];
}

// --- undecimated (a trous) 1D passes, periodic --------------------------

// Along rows (horizontal): lo(r, n) = sum_k f[k] x(r, n + step k).
void swt_rows(const Frame& x, int step, std::span<const double> f, Frame& out) {
  out = Frame(x.height(), x.width());
  for (int r = 0; r < x.height(); ++r) {
    const double* src = x.row(r).data();
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < f.size(); ++k) add_shifted(dst, src, x.width(), step * static_cast<int>(k), f[k]);
  }
}

void swt_cols(const Frame& x, int step, std::span<const double> f, Frame& out) {
  out = Frame(x.height(), x.width());
  for (int r = 0; r < x.height(); ++r) {
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double* src = x.row(wrap(r + step * static_cast<int>(k), x.height())).data();
      const double w = f[k];
      for (int c = 0; c < x.width(); ++c) dst[c] += w * src[c];
    }
  }
}

// Adjoint passes: out(r, m) += f[k] y(r, m - step k).
void swt_rows_adjoint(const Frame& y, int step, std::span<const double> f, Frame& out) {
  for (int r = 0; r < y.height(); ++r) {
    const double* src = y.row(r).data();
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < f.size(); ++k) add_shifted(dst, src, y.width(), -step * static_cast<int>(k), f[k]);
  }
}

void swt_cols_adjoint(const Frame& y, int step, std::span<const double> f, Frame& out) {
  for (int r = 0; r < y.height(); ++r) {
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double* src = y.row(wrap(r - step * static_cast<int>(k), y.height())).data();
      const double w = f[k];
      for (int c = 0; c < y.width(); ++c) dst[c] += w * src[c];
    }
  }
}

// --- decimated 1D passes, periodic ---------------------------------------

// a(r, n) = sum_k f[k] x(r, 2n + k)
Frame dwt_rows(const Frame& x, std::span<const double> f) {
  Frame out(x.height(), x.width() / 2);
  for (int r = 0; r < x.height(); ++r) {
    for (int n = 0; n < out.width(); ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * x(r, wrap(2 * n + static_cast<int>(k), x.width()));
      out(r, n) = acc;
    }
  }
  return out;
}

Frame dwt_cols(const Frame& x, std::span<const double> f) {
  Frame out(x.height() / 2, x.width());
  for (int n = 0; n < out.height(); ++n) {
    double* dst = out.row(n).data();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double* src = x.row(wrap(2 * n + static_cast<int>(k), x.height())).data();
      for (int c = 0; c < x.width(); ++c) dst[c] += f[k] * src[c];
    }
  }
  return out;
}

void idwt_rows(const Frame& a, std::span<const double> f, Frame& out) {
  for (int r = 0; r < a.height(); ++r) {
    for (int n = 0; n < a.width(); ++n) {
      const double v = a(r, n);
      for (std::size_t k = 0; k < f.size(); ++k) out(r, wrap(2 * n + static_cast<int>(k), out.width())) += f[k] * v;
    }
  }
}

void idwt_cols(const Frame& a, std::span<const double> f, Frame& out) {
  for (int n = 0; n < a.height(); ++n) {
    const double* src = a.row(n).data();
    for (std::size_t k = 0; k < f.size(); ++k) {
      double* dst = out.row(wrap(2 * n + static_cast<int>(k), out.height())).data();
      for (int c = 0; c < a.width(); ++c) dst[c] += f[k] * src[c];
    }
  }
}

void check_plan(const WaveletPlan& plan) {
  if (plan.levels < 1) throw InvalidArgument("wavelet plan needs at least one level");
}

}  // namespace

std::span<const double> db5_lowpass() { return kDb5Low; }
std::span<const double> db5_highpass() { return kDb5High; }

double WaveletCoeffs::energy() const {
  double e = dot(approximation, approximation);
  for (const auto& level : details) {
    for (const Frame& b : level.bands) e += dot(b, b);
  }
  return e;
}

double WaveletCoeffs::weighted_energy() const {
  if (mode == WaveletMode::Decimated) return energy();
  double e = 0.0;
  double w = 1.0;
  for (const auto& level : details) {
    w *= 0.25;
    for (const Frame& b : level.bands) e += w * dot(b, b);
  }
  return e + w * dot(approximation, approximation);
}

WaveletCoeffs dwt_forward(const Frame& frame, const WaveletPlan& plan) {
  check_plan(plan);
  const auto lo = db5_lowpass();
  const auto hi = db5_highpass();
  WaveletCoeffs out;
  out.mode = plan.mode;
  out.height = frame.height();
  out.width = frame.width();

  if (plan.mode == WaveletMode::Decimated) {
    const int block = 1 << plan.levels;
    if (frame.height() % block != 0 || frame.width() % block != 0) {
      throw DimensionError("dwt_forward: frame " + std::to_string(frame.height()) + "x" +
                           std::to_string(frame.width()) + " not divisible by 2^" + std::to_string(plan.levels));
    }
    Frame approx = frame;
    for (int q = 0; q < plan.levels; ++q) {
      const Frame row_lo = dwt_rows(approx, lo);
      const Frame row_hi = dwt_rows(approx, hi);
      WaveletLevel level{{dwt_cols(row_lo, hi), dwt_cols(row_hi, lo), dwt_cols(row_hi, hi)}};
      approx = dwt_cols(row_lo, lo);
      out.details.push_back(std::move(level));
    }
    out.approximation = std::move(approx);
    return out;
  }

  Frame approx = frame;
  Frame row_lo, row_hi, ll;
  for (int q = 0; q < plan.levels; ++q) {
    const int step = 1 << q;
    swt_rows(approx, step, lo, row_lo);
    swt_rows(approx, step, hi, row_hi);
    WaveletLevel level;
    swt_cols(row_lo, step, hi, level.bands[0]);
    swt_cols(row_hi, step, lo, level.bands[1]);
    swt_cols(row_hi, step, hi, level.bands[2]);
    swt_cols(row_lo, step, lo, ll);
    approx = std::move(ll);
    out.details.push_back(std::move(level));
  }
  out.approximation = std::move(approx);
  return out;
}

Frame dwt_inverse(const WaveletCoeffs& coeffs, const WaveletPlan& plan) {
  check_plan(plan);
  if (coeffs.mode != plan.mode || coeffs.levels() != plan.levels) {
    throw InvalidArgument("dwt_inverse: coefficients were produced by a different wavelet plan");
  }
  const auto lo = db5_lowpass();
  const auto hi = db5_highpass();

  if (plan.mode == WaveletMode::Decimated) {
    Frame approx = coeffs.approximation;
    for (int q = plan.levels - 1; q >= 0; --q) {
      const auto& b = coeffs.details[q].bands;
      Frame row_lo(approx.height() * 2, approx.width());
      Frame row_hi(approx.height() * 2, approx.width());
      idwt_cols(approx, lo, row_lo);
      idwt_cols(b[0], hi, row_lo);
      idwt_cols(b[1], lo, row_hi);
      idwt_cols(b[2], hi, row_hi);
      Frame next(row_lo.height(), row_lo.width() * 2);
      idwt_rows(row_lo, lo, next);
      idwt_rows(row_hi, hi, next);
      approx = std::move(next);
    }
    return approx;
  }

  Frame approx = coeffs.approximation;
  for (int q = plan.levels - 1; q >= 0; --q) {
    const int step = 1 << q;
    const auto& b = coeffs.details[q].bands;
    Frame row_lo(approx.height(), approx.width());
    Frame row_hi(approx.height(), approx.width());
    swt_cols_adjoint(approx, step, lo, row_lo);
    swt_cols_adjoint(b[0], step, hi, row_lo);
    swt_cols_adjoint(b[1], step, lo, row_hi);
    swt_cols_adjoint(b[2], step, hi, row_hi);
    Frame next(approx.height(), approx.width());
    swt_rows_adjoint(row_lo, step, lo, next);
    swt_rows_adjoint(row_hi, step, hi, next);
    next *= 0.25;  // average over the four polyphase branches
    approx = std::move(next);
  }
  return approx;
}

void threshold_values(std::span<double> values, ThresholdKind kind, double lambda_tau, HardRule rule) {
  if (lambda_tau < 0.0) throw InvalidArgument("threshold: lambda_tau must be non-negative");
  if (kind == ThresholdKind::Soft) {
    for (double& v : values) {
      const double mag = std::abs(v) - lambda_tau;
      v = mag > 0.0 ? std::copysign(mag, v) : 0.0;
    }
    return;
  }
  for (double& v : values) {
    const bool keep = rule == HardRule::Magnitude ? std::abs(v) >= lambda_tau : v >= lambda_tau;
    if (!keep) v = 0.0;
  }
}

WaveletCoeffs threshold(WaveletCoeffs coeffs, ThresholdKind kind, double lambda_tau, HardRule rule) {
  for (auto& level : coeffs.details) {
    for (Frame& b : level.bands) threshold_values(b.values(), kind, lambda_tau, rule);
  }
  return coeffs;
}

Frame project_omega2(const Frame& frame, const WaveletPlan& plan, ThresholdKind kind, double lambda_tau,
                     HardRule rule) {
  return dwt_inverse(threshold(dwt_forward(frame, plan), kind, lambda_tau, rule), plan);
}

}  // namespace mrsr
