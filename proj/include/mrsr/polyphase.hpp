#pragma once

#include <array>
#include <limits>
#include <vector>

#include "mrsr/frame.hpp"

namespace mrsr {

// Projection weight lambda_1 of the data-fidelity step. Infinity is a genuine
// sentinel: the system degenerates to the unweighted normal equations rather
// than a large finite weight.
class Lambda1 {
 public:
  static Lambda1 infinity() { return Lambda1(); }
  explicit Lambda1(double value);

  bool is_infinite() const noexcept { return infinite_; }
  // Only meaningful when finite.
  double value() const noexcept { return value_; }
  // +Inf for the sentinel; the on-disk encoding.
  double encoded() const noexcept { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }
  static Lambda1 from_encoded(double v);

  friend bool operator==(const Lambda1&, const Lambda1&) = default;

 private:
  Lambda1() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

// Ordered coset offsets of diag(d, d): row-major over {0..d-1}^2.
struct CosetSet {
  int d = 1;
  std::vector<std::array<int, 2>> cosets;

  explicit CosetSet(const DecimationSpec& spec) : d(spec.d), cosets(spec.cosets()) {}
  std::size_t size() const noexcept { return cosets.size(); }
};

struct PolyphaseSignal {
  std::vector<Frame> components;
};

// d^2 x d^2 grid of FIR entries. Entry (i, j) maps input coset j to output
// coset i: out_i = sum_j entry(i, j) * in_j.
class PolyphaseMatrix {
 public:
  explicit PolyphaseMatrix(int d);

  static PolyphaseMatrix identity(int d);

  int d() const noexcept { return d_; }
  int channels() const noexcept { return d_ * d_; }
  Kernel2D& entry(int i, int j) { return entries_[static_cast<std::size_t>(i) * channels() + j]; }
  const Kernel2D& entry(int i, int j) const { return entries_[static_cast<std::size_t>(i) * channels() + j]; }

  // Frobenius norm of the coefficient difference to the identity matrix.
  double distance_to_identity() const;
  bool all_finite() const;

 private:
  int d_;
  std::vector<Kernel2D> entries_;
};

// Component i holds x(M n - k_i), read periodically.
PolyphaseSignal polyphase_decompose(const Frame& frame, const CosetSet& cosets);
Frame polyphase_recompose(const PolyphaseSignal& signal, const CosetSet& cosets);

// Polyphase representation of
//   A = lambda1 (H'D'DH + alphaT S'S) + I   (finite lambda1)
//   A = H'D'DH + alphaT S'S + ridge I       (lambda1 = infinity)
// obtained by probing A with unit impulses on each input coset.
PolyphaseMatrix build_system_transfer(Lambda1 lambda1, double alphaT, const Kernel2D& h, const Kernel2D& s,
                                      const DecimationSpec& spec, double ridge = 0.0);

// Applies the normal-equation operator above directly with core imaging
// operators (Periodic boundary). Reference path for the polyphase route.
Frame apply_system_operator(const Frame& x, Lambda1 lambda1, double alphaT, const Kernel2D& h, const Kernel2D& s,
                            const DecimationSpec& spec, double ridge = 0.0);

Frame apply_polyphase(const PolyphaseMatrix& matrix, const Frame& frame,
                      BoundaryRule boundary = BoundaryRule::Periodic);

// Product a(z) b(z); entry (i, j) = sum_m a(i, m) * b(m, j).
PolyphaseMatrix compose(const PolyphaseMatrix& a, const PolyphaseMatrix& b);

}  // namespace mrsr
