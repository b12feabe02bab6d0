#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mrsr/errors.hpp"
#include "mrsr/experiment.hpp"

namespace {

using namespace mrsr;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCacheStale = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string method;
  int scale = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<int> count;
  std::string cache;
  std::string frames;
  std::string reference;
  std::string out;
  std::string report;
  std::string trajectory;
  std::string format;
  std::optional<int> threads;
  int trials = 20;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.method.empty()) cfg.set("method", o.method);
  if (o.scale != 0) cfg.scale = o.scale;
  if (o.seed) cfg.seed = *o.seed;
  if (o.seeds) cfg.seeds = *o.seeds;
  if (o.count) cfg.synthetic.frame_count = *o.count;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.cache.empty()) cfg.cache = o.cache;
  if (!o.frames.empty()) cfg.frames = o.frames;
  if (!o.reference.empty()) cfg.reference = o.reference;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.report.empty()) cfg.report = o.report;
  if (!o.trajectory.empty()) cfg.trajectory = o.trajectory;
  if (!o.format.empty()) cfg.format = parse_format(o.format);
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

int cmd_design(const Options& o) {
  RunConfig cfg = resolve(o);
  if (cfg.cache.empty()) throw ConfigError("design needs --cache <dir>");
  std::filesystem::create_directories(cfg.cache);
  std::vector<Method> methods;
  if (o.method.empty()) methods = {Method::Mtsr, Method::Wmtsr};
  else methods = {cfg.method};
  for (Method m : methods) {
    if (m != Method::Mtsr && m != Method::Wmtsr) throw ConfigError(to_string(m) + " does not use a filterbank");
    const DesignSpec spec = design_spec_for(m, cfg.params_for(m));
    if (auto w = spec.warning()) std::cerr << "warning: " << *w << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    const InverseFilterbankCache bank = design_filterbank(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path = cache_path(cfg.cache, m);
    cache_store(path, bank);
    std::printf("%s: %zu filterbank(s), tap radius %d, designed in %.2f s -> %s\n", to_string(m).c_str(),
                bank.records.size(), bank.tap_radius, secs, path.string().c_str());
    for (const auto& rec : bank.records) {
      const PolyphaseMatrix T =
          build_system_transfer(rec.lambda1, spec.alphaT, spec.h, spec.s, DecimationSpec(spec.d), spec.ridge);
      const InverseValidation v = validate_inverse(rec.inverse, T, o.trials, cfg.seed);
      std::printf("  lambda1=%s residual=%.3e max_rel_err=%.3e mean_rel_err=%.3e\n",
                  rec.lambda1.is_infinite() ? "inf" : std::to_string(rec.lambda1.value()).c_str(), rec.residual,
                  v.max_relative_error, v.mean_relative_error);
    }
  }
  return kExitOk;
}

int cmd_synth(const Options& o) {
  RunConfig cfg = resolve(o);
  if (cfg.out.empty()) throw ConfigError("synth needs --out <dir>");
  const SyntheticSequence seq = generate_synthetic(cfg.synthetic_for(cfg.seed));
  const std::filesystem::path dir(cfg.out);
  frames_write(dir / "hr", seq.hr, cfg.format);
  frames_write(dir / "lr", seq.lr, cfg.format);
  std::ofstream motion = open_output((dir / "motion.csv").string());
  motion << "frame,dx,dy\n";
  for (std::size_t k = 0; k < seq.motion.size(); ++k) {
    motion << k + 1 << ',' << seq.motion[k].dx << ',' << seq.motion[k].dy << '\n';
  }
  std::printf("wrote %zu HR and LR frames to %s\n", seq.hr.size(), cfg.out.c_str());
  return kExitOk;
}

int cmd_run(const Options& o) {
  RunConfig cfg = resolve(o);
  if (cfg.frames.empty()) throw ConfigError("run needs --frames <glob-or-y4m>");
  const std::vector<Frame> lr = frames_read(cfg.frames);
  std::optional<std::vector<Frame>> reference;
  if (!cfg.reference.empty()) reference = frames_read(cfg.reference);
  RunConfig single = cfg;
  single.methods = {cfg.method};
  auto banks = prepare_filterbanks(single);
  std::optional<InverseFilterbankCache> cache;
  if (banks.count(cfg.method) != 0) cache = std::move(banks.at(cfg.method));
  SrrEngine engine(cfg.method, cfg.params_for(cfg.method), std::move(cache));
  const SequenceResult r = super_resolve(engine, lr, reference ? &*reference : nullptr, nullptr, !cfg.out.empty());
  if (!cfg.out.empty()) frames_write(cfg.out, r.estimates, cfg.format);
  if (!cfg.report.empty()) {
    if (!reference) throw ConfigError("--report needs --reference frames to score against");
    std::ofstream out = open_output(cfg.report);
    write_sequence_report(out, cfg.method, r.metrics);
  }
  std::printf("%s: %zu frames in %.3f s (%.1f ms/frame)\n", to_string(cfg.method).c_str(), lr.size(), r.seconds,
              1e3 * r.seconds / static_cast<double>(lr.size()));
  if (reference) {
    double total = 0.0;
    for (const auto& m : r.metrics) total += m.mse;
    std::printf("mean MSE %.4f (%.2f dB)\n", total / static_cast<double>(r.metrics.size()),
                mse_db(total / static_cast<double>(r.metrics.size())));
  }
  return kExitOk;
}

int cmd_eval(const Options& o) {
  RunConfig cfg = resolve(o);
  if (cfg.frames.empty() || cfg.reference.empty()) throw ConfigError("eval needs --frames and --reference");
  const auto test = frames_read(cfg.frames);
  const auto ref = frames_read(cfg.reference);
  if (test.size() != ref.size()) {
    throw DimensionError("sequence lengths differ: " + std::to_string(test.size()) + " vs " + std::to_string(ref.size()));
  }
  std::vector<FrameMetrics> metrics;
  for (std::size_t k = 0; k < test.size(); ++k) metrics.push_back(compute_metrics(ref[k], test[k]));
  if (!cfg.report.empty()) {
    std::ofstream out = open_output(cfg.report);
    write_sequence_report(out, cfg.method, metrics);
  }
  FrameMetrics mean{0.0, 0.0, 0.0};
  for (const auto& m : metrics) {
    mean.mse += m.mse;
    mean.psnr += m.psnr;
    mean.ssim += m.ssim;
  }
  const double n = static_cast<double>(metrics.size());
  std::printf("frames %zu  mse %.4f  psnr %.3f dB  ssim %.4f\n", metrics.size(), mean.mse / n, mean.psnr / n,
              mean.ssim / n);
  return kExitOk;
}

int cmd_bench(const Options& o) {
  RunConfig cfg = resolve(o);
  const auto banks = prepare_filterbanks(cfg);
  const BenchReport report = run_bench(cfg, banks);
  if (!cfg.report.empty()) {
    std::ofstream out = open_output(cfg.report);
    write_bench_report(out, report);
  }
  if (!cfg.trajectory.empty()) {
    std::ofstream out = open_output(cfg.trajectory);
    write_trajectory(out, report);
  }
  std::printf("%d/%zu seeds, %d frames\n", report.completed_seeds(), report.seeds.size(), report.frames);
  if (report.completed_seeds() > 0) {
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      const FrameMetrics last = report.mean(m, report.frames - 1);
      std::printf("  %-8s last-frame MSE %.3f dB  SSIM %.4f  %.1f ms/frame\n", to_string(report.methods[m]).c_str(),
                  mse_db(last.mse), last.ssim,
                  1e3 * report.seconds[m] / (report.completed_seeds() * static_cast<double>(report.frames)));
    }
  }
  if (report.failure) std::rethrow_exception(report.failure);
  return kExitOk;
}

int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const CacheStaleError& err) {
    const std::string msg = err.what();
    std::cerr << "error: " << msg << (msg.find("mrsr design") == std::string::npos ? " (rerun `mrsr design`)\n" : "\n");
    return kExitCacheStale;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online video super-resolution with multirate inverse filterbanks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--method", o.method, "bicubic|ltsr|mtsr|wmtsr");
    sub->add_option("--scale", o.scale, "decimation factor d")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--cache", o.cache, "filterbank cache directory");
    sub->add_option("--threads", o.threads, "worker threads (1 = deterministic)")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "pgm|png|y4m for written frames");
  };

  auto* design = app.add_subcommand("design", "build and validate the inverse filterbank cache");
  common(design);
  design->add_option("--trials", o.trials, "random frames for validation");

  auto* synth = app.add_subcommand("synth", "generate the moving-window synthetic sequence");
  common(synth);
  synth->add_option("--out", o.out, "output directory");
  synth->add_option("--count", o.count, "number of frames")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "super-resolve a sequence");
  common(run);
  run->add_option("--frames", o.frames, "input LR frames (glob or .y4m)");
  run->add_option("--reference", o.reference, "HR ground truth for metrics (glob or .y4m)");
  run->add_option("--out", o.out, "directory for reconstructed frames");
  run->add_option("--report", o.report, "per-frame metrics (JSON lines)");

  auto* eval = app.add_subcommand("eval", "metrics between two sequences");
  common(eval);
  eval->add_option("--frames", o.frames, "test frames (glob or .y4m)");
  eval->add_option("--reference", o.reference, "reference frames (glob or .y4m)");
  eval->add_option("--report", o.report, "per-frame metrics (JSON lines)");

  auto* bench = app.add_subcommand("bench", "Monte Carlo over seeds on the synthetic protocol");
  common(bench);
  bench->add_option("--seeds", o.seeds, "number of seeds")->check(CLI::PositiveNumber);
  bench->add_option("--count", o.count, "frames per sequence")->check(CLI::PositiveNumber);
  bench->add_option("--report", o.report, "JSON lines report");
  bench->add_option("--trajectory", o.trajectory, "mean MSE per frame (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*design) return cmd_design(o);
    if (*synth) return cmd_synth(o);
    if (*run) return cmd_run(o);
    if (*eval) return cmd_eval(o);
    if (*bench) return cmd_bench(o);
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return kExitFailure;
}
