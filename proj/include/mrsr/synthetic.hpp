#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrsr/imaging.hpp"

namespace mrsr {

struct OutlierSpec {
  int size = 128;
  double value = 0.0;
  // 1-based frame numbers; the square is present for onset <= k < offset.
  int onset = 32;
  int offset = 35;
};

struct SyntheticSpec {
  // PGM or PNG file; a procedural image seeded by rng_seed when empty.
  std::optional<std::string> source_image;
  int procedural_size = 512;
  int window = 256;
  std::optional<OutlierSpec> outlier = OutlierSpec{};
  Kernel2D h = uniform_blur_kernel(3);
  int d = 2;
  double noise_variance = 10.0;
  int frame_count = 40;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct SyntheticSequence {
  std::vector<Frame> hr;
  std::vector<Frame> lr;
  // HR-grid displacement from frame k-1 to frame k; entry 0 is zero.
  std::vector<GlobalShift> motion;
};

// Dead-leaves occlusion model with striped texture on some leaves and a
// light optical blur: piecewise-smooth content with sharp edges and a
// heavy-tailed gradient distribution, in [0, 255].
Frame procedural_source(int size, std::uint64_t seed);

SyntheticSequence generate_synthetic(const SyntheticSpec& spec);
// Same, over a caller-supplied source image.
SyntheticSequence generate_synthetic(const SyntheticSpec& spec, const Frame& source);

}  // namespace mrsr
