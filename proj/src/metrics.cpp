#include "mrsr/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void require_same(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": frames differ in size (" + std::to_string(a.height()) + "x" +
                         std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                         std::to_string(b.width()) + ")");
  }
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double t = i - kWindow / 2;
    w[i] = std::exp(-t * t / (2.0 * kSigma * kSigma));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable "valid" filtering: output is (h - 10) x (w - 10).
Frame filter_valid(const Frame& x, const std::array<double, kWindow>& w) {
  const int oh = x.height() - kWindow + 1;
  const int ow = x.width() - kWindow + 1;
  Frame rows(x.height(), ow);
  for (int r = 0; r < x.height(); ++r) {
    const double* src = x.row(r).data();
    double* dst = rows.row(r).data();
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += w[k] * src[c + k];
      dst[c] = acc;
    }
  }
  Frame out(oh, ow);
  for (int r = 0; r < oh; ++r) {
    double* dst = out.row(r).data();
    for (int k = 0; k < kWindow; ++k) {
      const double* src = rows.row(r + k).data();
      for (int c = 0; c < ow; ++c) dst[c] += w[k] * src[c];
    }
  }
  return out;
}

Frame product(const Frame& a, const Frame& b) {
  Frame out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

}  // namespace

double mse(const Frame& reference, const Frame& test) {
  require_same(reference, test, "mse");
  if (reference.empty()) throw DimensionError("mse: empty frames");
  const Frame diff = reference - test;
  return dot(diff, diff) / static_cast<double>(diff.size());
}

double psnr(const Frame& reference, const Frame& test) {
  const double m = mse(reference, test);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double ssim(const Frame& reference, const Frame& test) {
  require_same(reference, test, "ssim");
  if (reference.height() < kWindow || reference.width() < kWindow) {
    throw DimensionError("ssim: frames must be at least 11x11");
  }
  const auto w = gaussian_window();
  const Frame mu_x = filter_valid(reference, w);
  const Frame mu_y = filter_valid(test, w);
  const Frame xx = filter_valid(product(reference, reference), w);
  const Frame yy = filter_valid(product(test, test), w);
  const Frame xy = filter_valid(product(reference, test), w);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x.data()[i];
    const double my = mu_y.data()[i];
    const double vx = xx.data()[i] - mx * mx;
    const double vy = yy.data()[i] - my * my;
    const double cxy = xy.data()[i] - mx * my;
    total += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mu_x.size());
}

FrameMetrics compute_metrics(const Frame& reference, const Frame& test) {
  FrameMetrics m;
  m.mse = mse(reference, test);
  m.psnr = m.mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(255.0 * 255.0 / m.mse);
  m.ssim = ssim(reference, test);
  return m;
}

double mse_db(double mse) {
  if (mse == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mse);
}

}  // namespace mrsr
