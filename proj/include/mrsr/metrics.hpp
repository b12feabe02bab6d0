#pragma once

#include "mrsr/frame.hpp"

namespace mrsr {

struct FrameMetrics {
  double mse = 0.0;   // per pixel, linear
  double psnr = 0.0;  // dB re 255; +inf when mse == 0
  double ssim = 1.0;
};

double mse(const Frame& reference, const Frame& test);
double psnr(const Frame& reference, const Frame& test);
// Gaussian-window SSIM (11 x 11, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255),
// averaged over window positions fully inside the frame.
double ssim(const Frame& reference, const Frame& test);

FrameMetrics compute_metrics(const Frame& reference, const Frame& test);

// 10 log10(mse); -inf for zero.
double mse_db(double mse);

}  // namespace mrsr
