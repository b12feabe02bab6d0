#pragma once

#include <vector>

#include "mrsr/imaging.hpp"

namespace mrsr {

struct FlowParams {
  double lambda_smooth = 1e3;
  int pyramid_levels = 4;
  double pyramid_spacing = 2.0;
  int iterations_per_level = 50;

  void validate() const;
};

// Phase correlation with a quadratic sub-pixel peak fit. Returns the shift
// with curr(p) ~= prev(p - shift); components are bounded by half the frame
// size.
GlobalShift estimate_global_shift(const Frame& prev, const Frame& curr);

// Coarse-to-fine Horn-Schunck flow with the same convention. When
// `finest_energy` is given it receives the Horn-Schunck energy after every
// sweep at the finest pyramid level.
DenseFlow estimate_dense_flow(const Frame& prev, const Frame& curr, const FlowParams& params,
                              std::vector<double>* finest_energy = nullptr);

// Maps a motion estimated on the LR grid onto the HR grid of factor d.
MotionEstimate upscale_motion(const MotionEstimate& motion, int d);

}  // namespace mrsr
