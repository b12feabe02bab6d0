#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrsr/polyphase.hpp"

namespace mrsr {

// Ridge added to the lambda1 = infinity system before design; the unweighted
// normal equations are only marginally conditioned at low frequencies.
inline constexpr double kDefaultDesignRidge = 1e-8;

struct DesignSpec {
  int tap_radius = 7;
  std::vector<Lambda1> lambda1_values{Lambda1::infinity()};
  // Weight on S'S inside the system. For the Tikhonov solver this is
  // alpha + alphaT; for the alternating-projections solver it is alphaT.
  double alphaT = 0.015;
  Kernel2D h;
  Kernel2D s;
  int d = 2;
  double ridge = kDefaultDesignRidge;

  // Non-empty when tap_radius is smaller than the support of T's entries.
  std::optional<std::string> warning() const;
};

struct InverseDesign {
  PolyphaseMatrix inverse;
  // Frobenius norm of the coefficients of U T - I at the minimiser.
  double residual = 0.0;
  // Per output coset: reciprocal-condition-based estimate of the normal
  // matrix condition number.
  std::vector<double> condition;
};

// Least-squares FIR approximate inverse of T with entries supported on
// (2 r + 1)^2 taps centred at the origin. Each output coset is an independent
// least-squares problem.
InverseDesign design_inverse(const PolyphaseMatrix& transfer, int tap_radius);

struct InverseValidation {
  double max_relative_error = 0.0;
  double mean_relative_error = 0.0;
  // Frobenius norm of compose(U, T) - I.
  double coefficient_residual = 0.0;
};

// Reconstruction error of apply(U, apply(T, x)) over random frames of
// `frame_size` x `frame_size` HR pixels.
InverseValidation validate_inverse(const PolyphaseMatrix& inverse, const PolyphaseMatrix& transfer, int trials,
                                   std::uint64_t seed = 1, int frame_size = 64);

struct FilterbankRecord {
  Lambda1 lambda1 = Lambda1::infinity();
  PolyphaseMatrix inverse{1};
  double residual = 0.0;
};

struct InverseFilterbankCache {
  int d = 2;
  int tap_radius = 7;
  double alphaT = 0.0;
  double ridge = kDefaultDesignRidge;
  std::vector<FilterbankRecord> records;

  const FilterbankRecord* find(Lambda1 lambda1) const;
  std::uint64_t design_spec_hash() const;
};

// FNV-1a over the configuration fields stored in the cache header.
std::uint64_t design_spec_hash(const DesignSpec& spec);

// Designs one inverse per lambda1 value.
InverseFilterbankCache design_filterbank(const DesignSpec& spec);

// Binary format "MRFB": see docs/cache_format.md.
void cache_store(const std::filesystem::path& path, const InverseFilterbankCache& cache);
InverseFilterbankCache cache_load(const std::filesystem::path& path);
// Throws CacheStaleError when the stored header does not match `expected`.
InverseFilterbankCache cache_load(const std::filesystem::path& path, const DesignSpec& expected);

}  // namespace mrsr
