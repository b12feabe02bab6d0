#include "mrsr/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

using json = nlohmann::ordered_json;

json metrics_json(const FrameMetrics& m) {
  json j;
  j["mse"] = m.mse;
  j["mse_db"] = std::isfinite(mse_db(m.mse)) ? json(mse_db(m.mse)) : json(nullptr);
  j["psnr"] = std::isfinite(m.psnr) ? json(m.psnr) : json(nullptr);
  j["ssim"] = m.ssim;
  return j;
}

bool uses_filterbank(Method m) { return m == Method::Mtsr || m == Method::Wmtsr; }

}  // namespace

std::filesystem::path cache_path(const std::filesystem::path& dir, Method m) { return dir / (to_string(m) + ".mrfb"); }

SequenceResult super_resolve(SrrEngine& engine, const std::vector<Frame>& lr, const std::vector<Frame>* reference,
                             const std::vector<GlobalShift>* hr_motion, bool keep_estimates) {
  if (reference != nullptr && reference->size() != lr.size()) {
    throw DimensionError("reference has " + std::to_string(reference->size()) + " frames, input has " +
                         std::to_string(lr.size()));
  }
  if (hr_motion != nullptr && hr_motion->size() != lr.size()) throw DimensionError("motion list length mismatch");
  SequenceResult result;
  double seconds = 0.0;
  for (std::size_t k = 0; k < lr.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const Frame& x = hr_motion != nullptr ? engine.process(lr[k], (*hr_motion)[k]) : engine.process(lr[k]);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (reference != nullptr) result.metrics.push_back(compute_metrics((*reference)[k], x));
    if (keep_estimates) result.estimates.push_back(x);
  }
  result.seconds = seconds;
  return result;
}

std::map<Method, InverseFilterbankCache> prepare_filterbanks(const RunConfig& config) {
  std::map<Method, InverseFilterbankCache> out;
  std::vector<Method> wanted = config.methods;
  wanted.push_back(config.method);
  for (Method m : wanted) {
    if (!uses_filterbank(m) || out.count(m) != 0) continue;
    const DesignSpec spec = design_spec_for(m, config.params_for(m));
    if (config.cache.empty()) {
      out.emplace(m, design_filterbank(spec));
    } else {
      const auto path = cache_path(config.cache, m);
      if (!std::filesystem::exists(path)) throw IoError("missing filterbank cache '" + path.string() + "'");
      out.emplace(m, cache_load(path, spec));
    }
  }
  return out;
}

int BenchReport::completed_seeds() const {
  int n = 0;
  for (const auto& s : per_seed) n += s.empty() ? 0 : 1;
  return n;
}

FrameMetrics BenchReport::mean(std::size_t m, int k) const {
  FrameMetrics acc{0.0, 0.0, 0.0};
  int n = 0;
  for (const auto& s : per_seed) {
    if (s.empty()) continue;
    const FrameMetrics& f = s[m][k];
    acc.mse += f.mse;
    acc.psnr += f.psnr;
    acc.ssim += f.ssim;
    ++n;
  }
  if (n > 0) {
    acc.mse /= n;
    acc.psnr /= n;
    acc.ssim /= n;
  }
  return acc;
}

BenchReport run_bench(const RunConfig& config, const std::map<Method, InverseFilterbankCache>& filterbanks) {
  config.validate();
  BenchReport report;
  report.methods = config.methods;
  report.frames = config.synthetic.frame_count;
  for (int s = 0; s < config.seeds; ++s) report.seeds.push_back(config.seed + static_cast<std::uint64_t>(s));
  report.per_seed.assign(report.seeds.size(), {});
  std::vector<std::vector<double>> seconds(report.seeds.size(), std::vector<double>(report.methods.size(), 0.0));
  std::vector<std::exception_ptr> failures(report.seeds.size());

  auto run_seed = [&](std::size_t s) {
    const SyntheticSequence seq = generate_synthetic(config.synthetic_for(report.seeds[s]));
    std::vector<std::vector<FrameMetrics>> per_method;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      const Method method = report.methods[m];
      std::optional<InverseFilterbankCache> cache;
      if (uses_filterbank(method)) {
        const auto it = filterbanks.find(method);
        if (it == filterbanks.end()) throw MissingDesignError("no filterbank prepared for " + to_string(method));
        cache = it->second;
      }
      SrrEngine engine(method, config.params_for(method), std::move(cache));
      SequenceResult r = super_resolve(engine, seq.lr, &seq.hr, nullptr, false);
      seconds[s][m] = r.seconds;
      per_method.push_back(std::move(r.metrics));
    }
    report.per_seed[s] = std::move(per_method);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < report.seeds.size(); s = next++) {
      try {
        run_seed(s);
      } catch (...) {
        failures[s] = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(config.threads, static_cast<int>(report.seeds.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  report.seconds.assign(report.methods.size(), 0.0);
  for (std::size_t s = 0; s < report.seeds.size(); ++s) {
    for (std::size_t m = 0; m < report.methods.size(); ++m) report.seconds[m] += seconds[s][m];
    if (failures[s] && !report.failure) report.failure = failures[s];
  }
  return report;
}

void write_bench_report(std::ostream& out, const BenchReport& report) {
  for (std::size_t s = 0; s < report.seeds.size(); ++s) {
    if (report.per_seed[s].empty()) continue;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      for (int k = 0; k < report.frames; ++k) {
        json j;
        j["type"] = "frame";
        j["seed"] = report.seeds[s];
        j["method"] = to_string(report.methods[m]);
        j["frame"] = k + 1;
        j.update(metrics_json(report.per_seed[s][m][k]));
        out << j.dump() << '\n';
      }
    }
  }
  const int n = report.completed_seeds();
  if (n == 0) return;
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    FrameMetrics total{0.0, 0.0, 0.0};
    for (int k = 0; k < report.frames; ++k) {
      const FrameMetrics mean = report.mean(m, k);
      total.mse += mean.mse;
      total.psnr += mean.psnr;
      total.ssim += mean.ssim;
      json j;
      j["type"] = "mean";
      j["method"] = to_string(report.methods[m]);
      j["frame"] = k + 1;
      j["seeds"] = n;
      j.update(metrics_json(mean));
      out << j.dump() << '\n';
    }
    total.mse /= report.frames;
    total.psnr /= report.frames;
    total.ssim /= report.frames;
    json j;
    j["type"] = "summary";
    j["method"] = to_string(report.methods[m]);
    j["frames"] = report.frames;
    j["seeds"] = n;
    j.update(metrics_json(total));
    out << j.dump() << '\n';
  }
}

void write_trajectory(std::ostream& out, const BenchReport& report) {
  out << "frame";
  for (Method m : report.methods) out << ',' << to_string(m);
  out << '\n';
  if (report.completed_seeds() == 0) return;
  const auto old_precision = out.precision(17);
  for (int k = 0; k < report.frames; ++k) {
    out << k + 1;
    for (std::size_t m = 0; m < report.methods.size(); ++m) out << ',' << report.mean(m, k).mse;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_sequence_report(std::ostream& out, Method method, const std::vector<FrameMetrics>& metrics) {
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    json j;
    j["type"] = "frame";
    j["method"] = to_string(method);
    j["frame"] = k + 1;
    j.update(metrics_json(metrics[k]));
    out << j.dump() << '\n';
  }
}

}  // namespace mrsr
