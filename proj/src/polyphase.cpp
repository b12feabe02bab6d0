#include "mrsr/polyphase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conv_detail.hpp"
#include "mrsr/errors.hpp"
#include "mrsr/imaging.hpp"

namespace mrsr {

Lambda1::Lambda1(double value) : infinite_(false), value_(value) {
  if (!(value > 0.0) || std::isinf(value)) {
    throw InvalidArgument("lambda1 must be a positive finite value (use Lambda1::infinity())");
  }
}

Lambda1 Lambda1::from_encoded(double v) {
  if (std::isinf(v) && v > 0) return infinity();
  return Lambda1(v);
}

PolyphaseMatrix::PolyphaseMatrix(int d) : d_(d), entries_(static_cast<std::size_t>(d) * d * d * d) {
  if (d < 1) throw InvalidArgument("polyphase matrix needs d >= 1");
}

PolyphaseMatrix PolyphaseMatrix::identity(int d) {
  PolyphaseMatrix m(d);
  for (int i = 0; i < m.channels(); ++i) m.entry(i, i) = Kernel2D::delta();
  return m;
}

double PolyphaseMatrix::distance_to_identity() const {
  double acc = 0.0;
  for (int i = 0; i < channels(); ++i) {
    for (int j = 0; j < channels(); ++j) {
      const Kernel2D& k = entry(i, j);
      for (double v : k.taps().values()) acc += v * v;
      if (i == j) {
        const double centre = k.at(0, 0);
        acc += (centre - 1.0) * (centre - 1.0) - centre * centre;
      }
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

bool PolyphaseMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Kernel2D& k) { return k.taps().all_finite(); });
}

PolyphaseSignal polyphase_decompose(const Frame& frame, const CosetSet& cosets) {
  const int d = cosets.d;
  if (frame.height() % d != 0 || frame.width() % d != 0) {
    throw DimensionError("polyphase_decompose: frame not divisible by " + std::to_string(d));
  }
  const int h = frame.height() / d;
  const int w = frame.width() / d;
  PolyphaseSignal out;
  out.components.reserve(cosets.size());
  for (const auto& k : cosets.cosets) {
    Frame comp(h, w);
    for (int r = 0; r < h; ++r) {
      const int sr = detail::wrap_index(d * r - k[0], frame.height());
      for (int c = 0; c < w; ++c) comp(r, c) = frame(sr, detail::wrap_index(d * c - k[1], frame.width()));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

Frame polyphase_recompose(const PolyphaseSignal& signal, const CosetSet& cosets) {
  if (signal.components.size() != cosets.size() || signal.components.empty()) {
    throw DimensionError("polyphase_recompose: component count does not match coset count");
  }
  const Frame& first = signal.components.front();
  for (const Frame& c : signal.components) {
    if (!c.same_shape(first)) throw DimensionError("polyphase_recompose: inconsistent component dimensions");
  }
  const int d = cosets.d;
  Frame out(first.height() * d, first.width() * d);
  for (std::size_t i = 0; i < cosets.size(); ++i) {
    const auto& k = cosets.cosets[i];
    const Frame& comp = signal.components[i];
    for (int r = 0; r < comp.height(); ++r) {
      const int dr = detail::wrap_index(d * r - k[0], out.height());
      for (int c = 0; c < comp.width(); ++c) out(dr, detail::wrap_index(d * c - k[1], out.width())) = comp(r, c);
    }
  }
  return out;
}

Frame apply_system_operator(const Frame& x, Lambda1 lambda1, double alphaT, const Kernel2D& h, const Kernel2D& s,
                            const DecimationSpec& spec, double ridge) {
  Frame data = adjoint_conv2d(upsample_zero(decimate(conv2d(x, h), spec), spec), h);
  data.axpy(alphaT, adjoint_conv2d(conv2d(x, s), s));
  if (lambda1.is_infinite()) {
    if (ridge != 0.0) data.axpy(ridge, x);
    return data;
  }
  data *= lambda1.value();
  data += x;
  return data;
}

namespace {

int kernel_radius(const Kernel2D& k) {
  return std::max({std::abs(k.min_row_offset()), std::abs(k.max_row_offset()), std::abs(k.min_col_offset()),
                   std::abs(k.max_col_offset())});
}

int kernel_extent(const Kernel2D& k) { return std::max(k.rows(), k.cols()); }

}  // namespace

PolyphaseMatrix build_system_transfer(Lambda1 lambda1, double alphaT, const Kernel2D& h, const Kernel2D& s,
                                      const DecimationSpec& spec, double ridge) {
  if (alphaT < 0.0) throw InvalidArgument("build_system_transfer: alphaT must be non-negative");
  if (ridge < 0.0) throw InvalidArgument("build_system_transfer: ridge must be non-negative");
  const int d = spec.d;
  const CosetSet cosets(spec);

  // Support of A in HR pixels, then in LR (polyphase) taps.
  const int hr_radius = std::max(2 * kernel_radius(h), 2 * kernel_radius(s));
  const int lr_radius = (hr_radius + d - 1) / d;

  int probe = (2 * kernel_extent(h) + 2 * kernel_extent(s) + 3) * d;
  probe = std::max(probe, d * (2 * lr_radius + 3));
  probe = ((probe + d - 1) / d) * d;
  const int centre = probe / (2 * d);  // LR index used for the impulse

  PolyphaseMatrix out(d);
  const int taps = 2 * lr_radius + 1;
  for (std::size_t j = 0; j < cosets.size(); ++j) {
    const auto& kj = cosets.cosets[j];
    Frame impulse(probe, probe, 0.0);
    impulse(detail::wrap_index(d * centre - kj[0], probe), detail::wrap_index(d * centre - kj[1], probe)) = 1.0;
    const Frame response = apply_system_operator(impulse, lambda1, alphaT, h, s, spec, ridge);
    for (std::size_t i = 0; i < cosets.size(); ++i) {
      const auto& ki = cosets.cosets[i];
      Frame t(taps, taps);
      for (int m0 = -lr_radius; m0 <= lr_radius; ++m0) {
        for (int m1 = -lr_radius; m1 <= lr_radius; ++m1) {
          t(m0 + lr_radius, m1 + lr_radius) = response(detail::wrap_index(d * (centre + m0) - ki[0], probe),
                                                       detail::wrap_index(d * (centre + m1) - ki[1], probe));
        }
      }
      out.entry(static_cast<int>(i), static_cast<int>(j)) = Kernel2D::centered(std::move(t));
    }
  }
  return out;
}

Frame apply_polyphase(const PolyphaseMatrix& matrix, const Frame& frame, BoundaryRule boundary) {
  const DecimationSpec spec(matrix.d());
  const CosetSet cosets(spec);
  const PolyphaseSignal in = polyphase_decompose(frame, cosets);
  const int n = matrix.channels();

  PolyphaseSignal out;
  out.components.assign(static_cast<std::size_t>(n), Frame(in.components[0].height(), in.components[0].width()));
  for (int j = 0; j < n; ++j) {
    int top = 0, bottom = 0, left = 0, right = 0;
    for (int i = 0; i < n; ++i) {
      const Kernel2D& k = matrix.entry(i, j);
      top = std::max(top, k.max_row_offset());
      bottom = std::max(bottom, -k.min_row_offset());
      left = std::max(left, k.max_col_offset());
      right = std::max(right, -k.min_col_offset());
    }
    const detail::PaddedFrame padded = detail::pad(in.components[j], top, bottom, left, right, boundary);
    for (int i = 0; i < n; ++i) detail::accumulate_conv(padded, matrix.entry(i, j), out.components[i]);
  }
  return polyphase_recompose(out, cosets);
}

PolyphaseMatrix compose(const PolyphaseMatrix& a, const PolyphaseMatrix& b) {
  if (a.d() != b.d()) throw InvalidArgument("compose: decimation factors differ");
  PolyphaseMatrix out(a.d());
  const int n = a.channels();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Kernel2D acc = convolve_kernels(a.entry(i, 0), b.entry(0, j));
      for (int m = 1; m < n; ++m) acc = acc + convolve_kernels(a.entry(i, m), b.entry(m, j));
      out.entry(i, j) = std::move(acc);
    }
  }
  return out;
}

}  // namespace mrsr
