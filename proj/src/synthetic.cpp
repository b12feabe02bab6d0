#include "mrsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mrsr/errors.hpp"
#include "mrsr/sequence_io.hpp"

namespace mrsr {

namespace {

Frame gaussian_blur(const Frame& x, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int n = 2 * radius + 1;
  std::vector<double> g(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = i - radius;
    g[i] = std::exp(-t * t / (2.0 * sigma * sigma));
    total += g[i];
  }
  Frame row(1, n), col(n, 1);
  for (int i = 0; i < n; ++i) {
    row(0, i) = g[i] / total;
    col(i, 0) = g[i] / total;
  }
  const Kernel2D kr(row, {0, radius});
  const Kernel2D kc(col, {radius, 0});
  return conv2d(conv2d(x, kr, BoundaryRule::SymmetricReflect), kc, BoundaryRule::SymmetricReflect);
}

Frame extract(const Frame& source, int top, int left, int size) {
  Frame out(size, size);
  for (int r = 0; r < size; ++r) {
    const double* src = source.row(top + r).data() + left;
    std::copy(src, src + size, out.row(r).data());
  }
  return out;
}

Frame load_source(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw ConfigError("source image must be .pgm or .png: '" + path + "'");
}

}  // namespace

void SyntheticSpec::validate() const {
  if (window < 1) throw ConfigError("synthetic window must be positive");
  if (d < 1 || window % d != 0) throw ConfigError("synthetic window must be a multiple of the scale factor");
  if (noise_variance < 0.0) throw ConfigError("noise variance must be non-negative");
  if (frame_count < 1) throw ConfigError("frame count must be positive");
  if (!source_image && procedural_size < window) throw ConfigError("procedural source smaller than the window");
  if (outlier) {
    if (outlier->size < 0 || outlier->size > window) throw ConfigError("outlier size must fit in the window");
    if (outlier->onset > outlier->offset) throw ConfigError("outlier onset must not follow its offset");
  }
}

Frame procedural_source(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Frame img(size, size, 128.0);
  constexpr double kMinRadius = 3.0;
  constexpr double kMaxRadiusFraction = 0.2;
  const double rmax = std::max(kMinRadius + 1.0, kMaxRadiusFraction * size);
  const int leaves = static_cast<int>(0.02 * size * size);
  for (int n = 0; n < leaves; ++n) {
    // p(r) ~ r^-3 on [rmin, rmax] by inverse transform
    const double u = unit(rng);
    const double a = 1.0 / (kMinRadius * kMinRadius);
    const double b = 1.0 / (rmax * rmax);
    const double r = 1.0 / std::sqrt(a - u * (a - b));
    const double cy = unit(rng) * size;
    const double cx = unit(rng) * size;
    const double level = 20.0 + 215.0 * unit(rng);
    const double gy = (unit(rng) - 0.5) * 40.0 / r;
    const double gx = (unit(rng) - 0.5) * 40.0 / r;
    const bool striped = unit(rng) < 0.25;
    const double period = 4.0 + 8.0 * unit(rng);
    const double theta = std::numbers::pi * unit(rng);
    const double amp = striped ? 15.0 + 15.0 * unit(rng) : 0.0;
    const double wy = std::sin(theta) * 2.0 * std::numbers::pi / period;
    const double wx = std::cos(theta) * 2.0 * std::numbers::pi / period;
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int r1 = std::min(size - 1, static_cast<int>(std::ceil(cy + r)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int c1 = std::min(size - 1, static_cast<int>(std::ceil(cx + r)));
    for (int y = r0; y <= r1; ++y) {
      for (int x = c0; x <= c1; ++x) {
        const double dy = y - cy;
        const double dx = x - cx;
        if (dy * dy + dx * dx > r * r) continue;
        double v = level + gy * dy + gx * dx;
        if (striped) v += amp * std::sin(wy * dy + wx * dx);
        img(y, x) = std::clamp(v, 0.0, 255.0);
      }
    }
  }
  return gaussian_blur(img, 0.6);
}

SyntheticSequence generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.source_image) return generate_synthetic(spec, load_source(*spec.source_image));
  return generate_synthetic(spec, procedural_source(spec.procedural_size, spec.rng_seed));
}

SyntheticSequence generate_synthetic(const SyntheticSpec& spec, const Frame& source) {
  spec.validate();
  if (source.height() < spec.window || source.width() < spec.window) {
    throw ConfigError("source image " + std::to_string(source.height()) + "x" + std::to_string(source.width()) +
                      " is smaller than the " + std::to_string(spec.window) + " pixel window");
  }
  // Separate stream from the procedural source so both stay reproducible.
  std::mt19937_64 rng(spec.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> step(0, 7);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));
  static constexpr int kSteps[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

  const int max_top = source.height() - spec.window;
  const int max_left = source.width() - spec.window;
  int top = max_top / 2;
  int left = max_left / 2;
  const DecimationSpec dec(spec.d);

  SyntheticSequence seq;
  for (int k = 1; k <= spec.frame_count; ++k) {
    GlobalShift shift;
    if (k > 1) {
      const auto& s = kSteps[step(rng)];
      const int new_top = std::clamp(top + s[0], 0, max_top);
      const int new_left = std::clamp(left + s[1], 0, max_left);
      shift = GlobalShift{static_cast<double>(left - new_left), static_cast<double>(top - new_top)};
      top = new_top;
      left = new_left;
    }
    Frame hr = extract(source, top, left, spec.window);
    if (spec.outlier && k >= spec.outlier->onset && k < spec.outlier->offset) {
      const int start = (spec.window - spec.outlier->size) / 2;
      for (int r = start; r < start + spec.outlier->size; ++r) {
        for (int c = start; c < start + spec.outlier->size; ++c) hr(r, c) = spec.outlier->value;
      }
    }
    Frame lr = decimate(conv2d(hr, spec.h), dec);
    if (spec.noise_variance > 0.0) {
      for (double& v : lr.values()) v += noise(rng);
    }
    seq.hr.push_back(std::move(hr));
    seq.lr.push_back(std::move(lr));
    seq.motion.push_back(shift);
  }
  return seq;
}

}  // namespace mrsr
