#pragma once

#include <variant>

#include "mrsr/frame.hpp"

namespace mrsr {

// Content displacement from the previous frame to the current one:
// current(p) ~= previous(p - displacement). dx is horizontal (columns),
// dy vertical (rows).
struct GlobalShift {
  double dx = 0.0;
  double dy = 0.0;
};

// Per-pixel displacement fields in the same convention as GlobalShift;
// u is horizontal, v vertical. Both are sized like the frame they warp.
struct DenseFlow {
  Frame u;
  Frame v;
};

using MotionEstimate = std::variant<GlobalShift, DenseFlow>;

// out(p) = sum_q K(q) in(p - q). Requires the kernel support to fit inside
// the frame.
Frame conv2d(const Frame& frame, const Kernel2D& kernel, BoundaryRule boundary = BoundaryRule::Periodic);

// Adjoint of conv2d: convolution with the spatially reversed kernel.
Frame adjoint_conv2d(const Frame& frame, const Kernel2D& kernel, BoundaryRule boundary = BoundaryRule::Periodic);

// Keeps coset (0, 0): out(n) = in(d n).
Frame decimate(const Frame& frame, const DecimationSpec& spec);

// Zero insertion, the adjoint of decimate.
Frame upsample_zero(const Frame& frame, const DecimationSpec& spec);

// Bilinear resampling at p - displacement(p); samples outside the frame
// take the nearest edge value.
Frame warp(const Frame& frame, const MotionEstimate& motion);

// Catmull-Rom (a = -0.5) interpolation by an integer factor with replicated
// borders. HR pixel i sits at LR coordinate i / d, matching decimate().
Frame bicubic_upscale(const Frame& lr, int d);

// Bilinear upsampling by an integer factor using the same i / d grid
// correspondence as bicubic_upscale.
Frame bilinear_upscale(const Frame& lr, int d);

// Bilinear resize with pixel centres aligned; used by image pyramids.
Frame resize_bilinear(const Frame& frame, int height, int width);

// Uniform n x n mask with unit DC gain.
Kernel2D uniform_blur_kernel(int n = 3);
// 4-neighbour Laplacian [[0,1,0],[1,-4,1],[0,1,0]] times `scale`. The default
// 1/8 keeps its spectral magnitude <= 1.
Kernel2D laplacian_kernel(double scale = 0.125);

}  // namespace mrsr
