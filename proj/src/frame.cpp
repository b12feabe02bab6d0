#include "mrsr/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

void require_same_shape(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": frame shapes differ (" + std::to_string(a.height()) + "x" +
                         std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                         std::to_string(b.width()) + ")");
  }
}

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Frame::Frame(int height, int width, double fill) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw DimensionError("frame dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

Frame::Frame(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0) {
    throw DimensionError("frame dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("frame data length does not match dimensions");
  }
}

bool Frame::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Frame& Frame::operator+=(const Frame& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Frame& Frame::operator-=(const Frame& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Frame& Frame::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Frame& Frame::axpy(double a, const Frame& other) {
  require_same_shape(*this, other, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * other.data_[i];
  return *this;
}

Frame operator+(Frame a, const Frame& b) { return a += b; }
Frame operator-(Frame a, const Frame& b) { return a -= b; }
Frame operator*(double s, Frame a) { return a *= s; }

double dot(const Frame& a, const Frame& b) {
  require_same_shape(a, b, "dot");
  return std::inner_product(a.data(), a.data() + a.size(), b.data(), 0.0);
}

double norm2(const Frame& a) { return std::sqrt(dot(a, a)); }

double sum(const Frame& a) { return std::accumulate(a.data(), a.data() + a.size(), 0.0); }

Frame circular_shift(const Frame& in, int dr, int dc) {
  Frame out(in.height(), in.width());
  for (int r = 0; r < in.height(); ++r) {
    const int sr = wrap(r - dr, in.height());
    for (int c = 0; c < in.width(); ++c) {
      out(r, c) = in(sr, wrap(c - dc, in.width()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Kernel2D::Kernel2D(Frame taps, std::array<int, 2> origin) : taps_(std::move(taps)), origin_(origin) {
  if (taps_.empty()) throw DimensionError("kernel support must be non-empty");
}

Kernel2D Kernel2D::delta() { return Kernel2D(Frame(1, 1, 1.0), {0, 0}); }

Kernel2D Kernel2D::shifted_delta(int dr, int dc) { return Kernel2D(Frame(1, 1, 1.0), {-dr, -dc}); }

Kernel2D Kernel2D::zero() { return Kernel2D(Frame(1, 1, 0.0), {0, 0}); }

Kernel2D Kernel2D::centered(Frame taps) {
  if (taps.height() % 2 == 0 || taps.width() % 2 == 0) {
    throw DimensionError("centered kernel needs odd dimensions");
  }
  const std::array<int, 2> origin{taps.height() / 2, taps.width() / 2};
  return Kernel2D(std::move(taps), origin);
}

double Kernel2D::at(int dr, int dc) const noexcept {
  const int r = dr + origin_[0];
  const int c = dc + origin_[1];
  if (r < 0 || r >= rows() || c < 0 || c >= cols()) return 0.0;
  return taps_(r, c);
}

Kernel2D Kernel2D::flipped() const {
  Frame t(rows(), cols());
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) t(rows() - 1 - r, cols() - 1 - c) = taps_(r, c);
  }
  return Kernel2D(std::move(t), {rows() - 1 - origin_[0], cols() - 1 - origin_[1]});
}

Kernel2D Kernel2D::padded_to(int min_row, int max_row, int min_col, int max_col) const {
  if (min_row > min_row_offset() || max_row < max_row_offset() || min_col > min_col_offset() ||
      max_col < max_col_offset()) {
    throw DimensionError("padded_to: target box does not contain the kernel support");
  }
  Frame t(max_row - min_row + 1, max_col - min_col + 1);
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) {
      t(r - origin_[0] - min_row, c - origin_[1] - min_col) = taps_(r, c);
    }
  }
  return Kernel2D(std::move(t), {-min_row, -min_col});
}

Kernel2D operator+(const Kernel2D& a, const Kernel2D& b) {
  const int r0 = std::min(a.min_row_offset(), b.min_row_offset());
  const int r1 = std::max(a.max_row_offset(), b.max_row_offset());
  const int c0 = std::min(a.min_col_offset(), b.min_col_offset());
  const int c1 = std::max(a.max_col_offset(), b.max_col_offset());
  Kernel2D out = a.padded_to(r0, r1, c0, c1);
  const Kernel2D pb = b.padded_to(r0, r1, c0, c1);
  out.taps() += pb.taps();
  return out;
}

Kernel2D operator*(double s, Kernel2D k) {
  k.taps() *= s;
  return k;
}

Kernel2D convolve_kernels(const Kernel2D& a, const Kernel2D& b) {
  Frame t(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
  for (int ar = 0; ar < a.rows(); ++ar) {
    for (int ac = 0; ac < a.cols(); ++ac) {
      const double w = a.taps()(ar, ac);
      if (w == 0.0) continue;
      for (int br = 0; br < b.rows(); ++br) {
        for (int bc = 0; bc < b.cols(); ++bc) t(ar + br, ac + bc) += w * b.taps()(br, bc);
      }
    }
  }
  return Kernel2D(std::move(t), {a.origin()[0] + b.origin()[0], a.origin()[1] + b.origin()[1]});
}

DecimationSpec::DecimationSpec(int factor) : d(factor) {
  if (factor < 1) throw InvalidArgument("decimation factor must be >= 1");
}

std::vector<std::array<int, 2>> DecimationSpec::cosets() const {
  std::vector<std::array<int, 2>> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) out.push_back({r, c});
  }
  return out;
}

}  // namespace mrsr
