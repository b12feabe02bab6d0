#include "mrsr/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conv_detail.hpp"
#include "mrsr/errors.hpp"

namespace mrsr {

namespace detail {

PaddedFrame pad(const Frame& x, int top, int bottom, int left, int right, BoundaryRule rule) {
  const int h = x.height();
  const int w = x.width();
  PaddedFrame out{Frame(h + top + bottom, w + left + right), top, left};
  std::vector<int> col_map(static_cast<std::size_t>(w + left + right));
  for (int j = 0; j < w + left + right; ++j) col_map[j] = map_index(j - left, w, rule);
  for (int i = 0; i < h + top + bottom; ++i) {
    const auto src = x.row(map_index(i - top, h, rule));
    auto dst = out.buffer.row(i);
    for (int j = 0; j < w + left + right; ++j) dst[j] = src[col_map[j]];
  }
  return out;
}

PaddedFrame pad_for(const Frame& x, const Kernel2D& k, BoundaryRule rule) {
  return pad(x, std::max(0, k.max_row_offset()), std::max(0, -k.min_row_offset()), std::max(0, k.max_col_offset()),
             std::max(0, -k.min_col_offset()), rule);
}

void accumulate_conv(const PaddedFrame& src, const Kernel2D& k, Frame& out) {
  const int h = out.height();
  const int w = out.width();
  const auto [orow, ocol] = k.origin();
  for (int tr = 0; tr < k.rows(); ++tr) {
    for (int tc = 0; tc < k.cols(); ++tc) {
      const double weight = k.taps()(tr, tc);
      if (weight == 0.0) continue;
      const int row_base = orow - tr + src.top;
      const int col_base = ocol - tc + src.left;
      for (int r = 0; r < h; ++r) {
        const double* in = src.buffer.row(r + row_base).data() + col_base;
        double* o = out.row(r).data();
        for (int c = 0; c < w; ++c) o[c] += weight * in[c];
      }
    }
  }
}

}  // namespace detail

namespace {

void require_kernel_fits(const Frame& frame, const Kernel2D& kernel) {
  if (kernel.rows() > frame.height() || kernel.cols() > frame.width()) {
    throw DimensionError("kernel support " + std::to_string(kernel.rows()) + "x" + std::to_string(kernel.cols()) +
                         " exceeds frame " + std::to_string(frame.height()) + "x" +
                         std::to_string(frame.width()));
  }
}

double sample_bilinear_clamped(const Frame& f, double y, double x) {
  const double ymax = f.height() - 1;
  const double xmax = f.width() - 1;
  y = std::clamp(y, 0.0, ymax);
  x = std::clamp(x, 0.0, xmax);
  const int r0 = static_cast<int>(std::floor(y));
  const int c0 = static_cast<int>(std::floor(x));
  const double fy = y - r0;
  const double fx = x - c0;
  const int r1 = std::min(r0 + 1, f.height() - 1);
  const int c1 = std::min(c0 + 1, f.width() - 1);
  const double top = (1.0 - fx) * f(r0, c0) + fx * f(r0, c1);
  const double bottom = (1.0 - fx) * f(r1, c0) + fx * f(r1, c1);
  return (1.0 - fy) * top + fy * bottom;
}

struct CubicTaps {
  int base;
  double w[4];
};

CubicTaps catmull_rom(double pos) {
  const int base = static_cast<int>(std::floor(pos));
  const double t = pos - base;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {base - 1,
          {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
           0.5 * (t3 - t2)}};
}

}  // namespace

Frame conv2d(const Frame& frame, const Kernel2D& kernel, BoundaryRule boundary) {
  require_kernel_fits(frame, kernel);
  Frame out(frame.height(), frame.width());
  detail::accumulate_conv(detail::pad_for(frame, kernel, boundary), kernel, out);
  return out;
}

Frame adjoint_conv2d(const Frame& frame, const Kernel2D& kernel, BoundaryRule boundary) {
  return conv2d(frame, kernel.flipped(), boundary);
}

Frame decimate(const Frame& frame, const DecimationSpec& spec) {
  const int d = spec.d;
  if (frame.height() % d != 0 || frame.width() % d != 0) {
    throw DimensionError("decimate: frame " + std::to_string(frame.height()) + "x" + std::to_string(frame.width()) +
                         " not divisible by " + std::to_string(d));
  }
  Frame out(frame.height() / d, frame.width() / d);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) out(r, c) = frame(d * r, d * c);
  }
  return out;
}

Frame upsample_zero(const Frame& frame, const DecimationSpec& spec) {
  const int d = spec.d;
  Frame out(frame.height() * d, frame.width() * d);
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) out(d * r, d * c) = frame(r, c);
  }
  return out;
}

Frame warp(const Frame& frame, const MotionEstimate& motion) {
  Frame out(frame.height(), frame.width());
  if (const auto* shift = std::get_if<GlobalShift>(&motion)) {
    const bool integral = shift->dx == std::round(shift->dx) && shift->dy == std::round(shift->dy);
    for (int r = 0; r < frame.height(); ++r) {
      for (int c = 0; c < frame.width(); ++c) {
        if (integral) {
          const int sr = std::clamp(r - static_cast<int>(shift->dy), 0, frame.height() - 1);
          const int sc = std::clamp(c - static_cast<int>(shift->dx), 0, frame.width() - 1);
          out(r, c) = frame(sr, sc);
        } else {
          out(r, c) = sample_bilinear_clamped(frame, r - shift->dy, c - shift->dx);
        }
      }
    }
    return out;
  }
  const auto& flow = std::get<DenseFlow>(motion);
  if (!flow.u.same_shape(frame) || !flow.v.same_shape(frame)) {
    throw DimensionError("warp: dense flow dimensions do not match the frame");
  }
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) {
      out(r, c) = sample_bilinear_clamped(frame, r - flow.v(r, c), c - flow.u(r, c));
    }
  }
  return out;
}

Frame bicubic_upscale(const Frame& lr, int d) {
  if (d < 1) throw InvalidArgument("bicubic_upscale: factor must be >= 1");
  if (d == 1) return lr;
  const int h = lr.height();
  const int w = lr.width();
  // Horizontal pass then vertical pass.
  Frame tmp(h, w * d);
  for (int c = 0; c < w * d; ++c) {
    const CubicTaps taps = catmull_rom(static_cast<double>(c) / d);
    for (int r = 0; r < h; ++r) {
      double acc = 0.0;
      for (int t = 0; t < 4; ++t) acc += taps.w[t] * lr(r, std::clamp(taps.base + t, 0, w - 1));
      tmp(r, c) = acc;
    }
  }
  Frame out(h * d, w * d);
  for (int r = 0; r < h * d; ++r) {
    const CubicTaps taps = catmull_rom(static_cast<double>(r) / d);
    auto dst = out.row(r);
    for (int t = 0; t < 4; ++t) {
      const auto src = tmp.row(std::clamp(taps.base + t, 0, h - 1));
      for (int c = 0; c < w * d; ++c) dst[c] += taps.w[t] * src[c];
    }
  }
  return out;
}

Frame bilinear_upscale(const Frame& lr, int d) {
  if (d < 1) throw InvalidArgument("bilinear_upscale: factor must be >= 1");
  if (d == 1) return lr;
  Frame out(lr.height() * d, lr.width() * d);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      out(r, c) = sample_bilinear_clamped(lr, static_cast<double>(r) / d, static_cast<double>(c) / d);
    }
  }
  return out;
}

Frame resize_bilinear(const Frame& frame, int height, int width) {
  Frame out(height, width);
  const double sy = static_cast<double>(frame.height()) / height;
  const double sx = static_cast<double>(frame.width()) / width;
  for (int r = 0; r < height; ++r) {
    const double y = (r + 0.5) * sy - 0.5;
    for (int c = 0; c < width; ++c) out(r, c) = sample_bilinear_clamped(frame, y, (c + 0.5) * sx - 0.5);
  }
  return out;
}

Kernel2D uniform_blur_kernel(int n) {
  if (n < 1 || n % 2 == 0) throw InvalidArgument("uniform blur size must be odd and positive");
  return Kernel2D::centered(Frame(n, n, 1.0 / (static_cast<double>(n) * n)));
}

Kernel2D laplacian_kernel(double scale) {
  Frame t(3, 3, 0.0);
  t(0, 1) = t(1, 0) = t(1, 2) = t(2, 1) = scale;
  t(1, 1) = -4.0 * scale;
  return Kernel2D::centered(std::move(t));
}

}  // namespace mrsr
