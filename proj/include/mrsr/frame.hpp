#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mrsr {

// A single-channel image stored row-major as 64-bit reals. Intensities are
// nominally in [0, 255] but nothing here clamps them.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, double fill = 0.0);
  Frame(int height, int width, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int row, int col) noexcept { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  double operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<double> row(int r) noexcept { return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const double> row(int r) const noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool same_shape(const Frame& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

  Frame& operator+=(const Frame& other);
  Frame& operator-=(const Frame& other);
  Frame& operator*=(double s) noexcept;

  // this += a * other
  Frame& axpy(double a, const Frame& other);

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

Frame operator+(Frame a, const Frame& b);
Frame operator-(Frame a, const Frame& b);
Frame operator*(double s, Frame a);

double dot(const Frame& a, const Frame& b);
double norm2(const Frame& a);
double sum(const Frame& a);

// Circular shift: out(r, c) = in(r - dr, c - dc) with wrap-around.
Frame circular_shift(const Frame& in, int dr, int dc);

// Finite-support 2D FIR filter. `origin` is the (row, col) index of the tap
// sitting at spatial offset 0, so tap (i, j) has offset (i - origin_row,
// j - origin_col).
class Kernel2D {
 public:
  Kernel2D() : taps_(1, 1, 0.0) {}
  Kernel2D(Frame taps, std::array<int, 2> origin);

  static Kernel2D delta();
  static Kernel2D shifted_delta(int dr, int dc);
  static Kernel2D zero();
  // Odd-sized kernel with origin at the centre.
  static Kernel2D centered(Frame taps);

  int rows() const noexcept { return taps_.height(); }
  int cols() const noexcept { return taps_.width(); }
  std::array<int, 2> origin() const noexcept { return origin_; }
  const Frame& taps() const noexcept { return taps_; }
  Frame& taps() noexcept { return taps_; }

  // Offset range covered by the support, inclusive.
  int min_row_offset() const noexcept { return -origin_[0]; }
  int max_row_offset() const noexcept { return rows() - 1 - origin_[0]; }
  int min_col_offset() const noexcept { return -origin_[1]; }
  int max_col_offset() const noexcept { return cols() - 1 - origin_[1]; }

  // Coefficient at spatial offset (dr, dc); zero outside the support.
  double at(int dr, int dc) const noexcept;

  // Spatial reversal K'(n) = K(-n); used for adjoints.
  Kernel2D flipped() const;
  double tap_sum() const { return sum(taps_); }

  // Re-express on a larger support; the new box must contain the old one.
  Kernel2D padded_to(int min_row, int max_row, int min_col, int max_col) const;

  friend bool operator==(const Kernel2D&, const Kernel2D&) = default;

 private:
  Frame taps_;
  std::array<int, 2> origin_{0, 0};
};

Kernel2D operator+(const Kernel2D& a, const Kernel2D& b);
Kernel2D operator*(double s, Kernel2D k);
// Full linear convolution of two kernels; origins add.
Kernel2D convolve_kernels(const Kernel2D& a, const Kernel2D& b);

enum class BoundaryRule { Periodic, SymmetricReflect };

// Diagonal decimation lattice M = diag(d, d).
struct DecimationSpec {
  int d = 1;

  explicit DecimationSpec(int factor);
  int determinant() const noexcept { return d * d; }
  // Coset offsets k_i in row-major order over {0..d-1}^2; k_1 = (0, 0).
  std::vector<std::array<int, 2>> cosets() const;
};

}  // namespace mrsr
