#pragma once

#include "mrsr/frame.hpp"

namespace mrsr::detail {

inline int wrap_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

// Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) ...
inline int reflect_index(int i, int n) {
  const int period = 2 * n;
  int r = wrap_index(i, period);
  return r < n ? r : period - 1 - r;
}

inline int map_index(int i, int n, BoundaryRule rule) {
  return rule == BoundaryRule::Periodic ? wrap_index(i, n) : reflect_index(i, n);
}

// Frame extended by the given margins; padded(i, j) = x(i - top, j - left)
// resolved through the boundary rule.
struct PaddedFrame {
  Frame buffer;
  int top = 0;
  int left = 0;
};

PaddedFrame pad(const Frame& x, int top, int bottom, int left, int right, BoundaryRule rule);

// Margins needed so every tap of `k` reads inside the padded buffer.
PaddedFrame pad_for(const Frame& x, const Kernel2D& k, BoundaryRule rule);

// out(r, c) += sum_q K(q) x(r - q) reading x from a padded buffer. `out` has
// the original frame dimensions.
void accumulate_conv(const PaddedFrame& src, const Kernel2D& k, Frame& out);

}  // namespace mrsr::detail
