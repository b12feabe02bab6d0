#pragma once

#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "mrsr/config.hpp"
#include "mrsr/metrics.hpp"

namespace mrsr {

struct SequenceResult {
  std::vector<Frame> estimates;
  std::vector<FrameMetrics> metrics;  // empty without a reference
  double seconds = 0.0;               // wall time of the SRR loop only
};

// Runs one engine over an LR sequence. `hr_motion`, when given, replaces
// motion estimation (entry k is the HR-grid motion into frame k).
SequenceResult super_resolve(SrrEngine& engine, const std::vector<Frame>& lr,
                             const std::vector<Frame>* reference = nullptr,
                             const std::vector<GlobalShift>* hr_motion = nullptr, bool keep_estimates = true);

// Filterbanks for each filterbank method in `config.methods`: loaded from
// `<config.cache>/<method>.mrfb` when a cache directory is set (stale caches
// raise CacheStaleError), otherwise designed.
std::map<Method, InverseFilterbankCache> prepare_filterbanks(const RunConfig& config);

std::filesystem::path cache_path(const std::filesystem::path& dir, Method m);

struct BenchReport {
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  int frames = 0;
  // per_seed[s][m][k]; seeds that failed have an empty entry.
  std::vector<std::vector<std::vector<FrameMetrics>>> per_seed;
  std::vector<double> seconds;  // per method, summed over seeds
  std::exception_ptr failure;   // first failure in seed order

  int completed_seeds() const;
  // Mean over completed seeds for method index m and 0-based frame k.
  FrameMetrics mean(std::size_t m, int k) const;
};

// Monte Carlo over seeds seed, seed + 1, ... on the synthetic protocol.
// Seeds are distributed over config.threads workers; results are ordered by
// seed, so the report does not depend on the thread count.
BenchReport run_bench(const RunConfig& config, const std::map<Method, InverseFilterbankCache>& filterbanks);

// JSON lines: one "frame" record per (seed, method, frame), one "mean" record
// per (method, frame) and one "summary" record per method. PSNR of a
// perfect frame is written as null.
void write_bench_report(std::ostream& out, const BenchReport& report);
// CSV: frame, then mean per-pixel MSE for each method.
void write_trajectory(std::ostream& out, const BenchReport& report);
// JSON lines for a single sequence run against a reference.
void write_sequence_report(std::ostream& out, Method method, const std::vector<FrameMetrics>& metrics);

}  // namespace mrsr
