#include <gtest/gtest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrsr/errors.hpp"
#include "mrsr/experiment.hpp"
#include "test_util.hpp"

using namespace mrsr;
using namespace mrsr::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mrsr_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Frame byte_frame(int h, int w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  Frame f(h, w);
  for (double& v : f.values()) v = u(rng);
  return f;
}

void write_png16(const fs::path& path, int w, int h) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w) * 2, 0x12);
  for (int r = 0; r < h; ++r) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.window = 64;
  s.procedural_size = 96;
  s.frame_count = 8;
  s.outlier = OutlierSpec{32, 0.0, 3, 5};
  return s;
}

}  // namespace

TEST(Metrics, IdenticalFrames) {
  std::mt19937_64 rng(1);
  const Frame f = byte_frame(32, 32, rng);
  const FrameMetrics m = compute_metrics(f, f);
  EXPECT_EQ(m.mse, 0.0);
  EXPECT_TRUE(std::isinf(m.psnr) && m.psnr > 0);
  EXPECT_NEAR(m.ssim, 1.0, 1e-12);
}

TEST(Metrics, ConstantOffset) {
  std::mt19937_64 rng(2);
  const Frame f = byte_frame(32, 32, rng);
  Frame g = f;
  for (double& v : g.values()) v += 1.0;
  EXPECT_NEAR(mse(f, g), 1.0, 1e-12);
  EXPECT_NEAR(psnr(f, g), 48.1308036086791, 1e-9);  // 10 log10(255^2)
  EXPECT_NEAR(mse_db(100.0), 20.0, 1e-12);
}

TEST(Metrics, InvertedNaturalImageHasLowSsim) {
  const Frame f = procedural_source(128, 3);
  Frame inv = f;
  for (double& v : inv.values()) v = 255.0 - v;
  EXPECT_LT(ssim(f, inv), 0.1);
}

TEST(Metrics, SsimAgainstDirectWindowSum) {
  // Direct evaluation of the SSIM formula at one window position.
  std::mt19937_64 rng(4);
  const Frame a = byte_frame(11, 11, rng);
  const Frame b = byte_frame(11, 11, rng);
  double w[11], total = 0.0;
  for (int i = 0; i < 11; ++i) total += (w[i] = std::exp(-(i - 5) * (i - 5) / 4.5));
  double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
  for (int r = 0; r < 11; ++r) {
    for (int c = 0; c < 11; ++c) {
      const double k = w[r] * w[c] / (total * total);
      mx += k * a(r, c);
      my += k * b(r, c);
      xx += k * a(r, c) * a(r, c);
      yy += k * b(r, c) * b(r, c);
      xy += k * a(r, c) * b(r, c);
    }
  }
  const double c1 = 6.5025, c2 = 58.5225;
  const double expected = ((2 * mx * my + c1) * (2 * (xy - mx * my) + c2)) /
                          ((mx * mx + my * my + c1) * (xx - mx * mx + yy - my * my + c2));
  EXPECT_NEAR(ssim(a, b), expected, 1e-12);
}

TEST(Metrics, DimensionMismatch) {
  EXPECT_THROW(mse(Frame(4, 4), Frame(4, 5)), DimensionError);
  EXPECT_THROW(ssim(Frame(16, 16), Frame(16, 15)), DimensionError);
}

TEST(Quantize, RoundHalfEvenAndClamp) {
  EXPECT_EQ(quantize(0.5), 0);
  EXPECT_EQ(quantize(1.5), 2);
  EXPECT_EQ(quantize(2.5), 2);
  EXPECT_EQ(quantize(2.6), 3);
  EXPECT_EQ(quantize(-7.0), 0);
  EXPECT_EQ(quantize(300.0), 255);
  EXPECT_EQ(quantize(std::nan("")), 0);
}

TEST(SequenceIo, PgmRoundTrip) {
  const fs::path dir = scratch_dir("pgm");
  std::mt19937_64 rng(5);
  const Frame f = byte_frame(17, 23, rng);
  write_pgm(dir / "a.pgm", f);
  EXPECT_EQ(read_pgm(dir / "a.pgm"), f);
  {
    std::ofstream out(dir / "c.pgm", std::ios::binary);
    out << "P5\n# comment\n2 1\n255\n" << '\x07' << '\xff';
  }
  EXPECT_EQ(read_pgm(dir / "c.pgm"), Frame(1, 2, {7.0, 255.0}));
  {
    std::ofstream out(dir / "bad.pgm", std::ios::binary);
    out << "P2\n2 2\n255\n1 2 3 4";
  }
  EXPECT_THROW(read_pgm(dir / "bad.pgm"), ParseError);
  {
    std::ofstream out(dir / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\nab";
  }
  EXPECT_THROW(read_pgm(dir / "short.pgm"), ParseError);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), IoError);
}

TEST(SequenceIo, PngRoundTripAndBitDepth) {
  const fs::path dir = scratch_dir("png");
  std::mt19937_64 rng(6);
  const Frame f = byte_frame(19, 13, rng);
  write_png(dir / "a.png", f);
  EXPECT_EQ(read_png(dir / "a.png"), f);
  write_png16(dir / "deep.png", 4, 4);
  try {
    read_png(dir / "deep.png");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported bit depth"), std::string::npos);
  }
}

TEST(SequenceIo, Y4mChromaIgnored) {
  const fs::path dir = scratch_dir("y4m");
  std::ofstream out(dir / "c.y4m", std::ios::binary);
  out << "YUV4MPEG2 W4 H2 F25:1 Ip C420jpeg\n";
  for (int k = 0; k < 2; ++k) {
    out << "FRAME\n";
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>(10 * k + i));
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>(200));  // 2x1 U and V
  }
  out.close();
  const auto frames = read_y4m(dir / "c.y4m");
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1], Frame(2, 4, {10, 11, 12, 13, 14, 15, 16, 17}));
}

TEST(SequenceIo, SequenceWriteAndGlobRead) {
  const fs::path dir = scratch_dir("seq");
  std::mt19937_64 rng(7);
  std::vector<Frame> frames;
  for (int k = 0; k < 3; ++k) frames.push_back(byte_frame(8, 8, rng));
  for (auto fmt : {SequenceFormat::Pgm, SequenceFormat::Png, SequenceFormat::Y4m}) {
    const fs::path sub = dir / to_string(fmt);
    const auto paths = frames_write(sub, frames, fmt);
    const std::string spec = fmt == SequenceFormat::Y4m ? paths[0].string() : (sub / ("*." + to_string(fmt))).string();
    EXPECT_EQ(frames_read(spec), frames) << to_string(fmt);
  }
  EXPECT_THROW(frames_read((dir / "nothing*.pgm").string()), IoError);
}

TEST(Synthetic, IdentityProtocol) {
  SyntheticSpec s = small_spec();
  s.d = 1;
  s.h = Kernel2D::delta();
  s.noise_variance = 0.0;
  s.outlier.reset();
  const SyntheticSequence seq = generate_synthetic(s);
  for (std::size_t k = 0; k < seq.hr.size(); ++k) EXPECT_EQ(seq.lr[k], seq.hr[k]);
}

TEST(Synthetic, OutlierWindow) {
  SyntheticSpec s;
  s.frame_count = 36;
  s.noise_variance = 0.0;
  const SyntheticSequence seq = generate_synthetic(s);
  auto block_is_black = [&](int frame) {
    const Frame& f = seq.hr[frame - 1];
    for (int r = 64; r < 192; ++r) {
      for (int c = 64; c < 192; ++c) {
        if (f(r, c) != 0.0) return false;
      }
    }
    return true;
  };
  EXPECT_FALSE(block_is_black(31));
  EXPECT_TRUE(block_is_black(32));
  EXPECT_TRUE(block_is_black(33));
  EXPECT_TRUE(block_is_black(34));
  EXPECT_FALSE(block_is_black(35));
  EXPECT_FALSE(block_is_black(36));
}

TEST(Synthetic, UnitRandomWalk) {
  const SyntheticSequence seq = generate_synthetic(small_spec());
  for (std::size_t k = 1; k < seq.motion.size(); ++k) {
    const auto& m = seq.motion[k];
    EXPECT_LE(std::abs(m.dx), 1.0);
    EXPECT_LE(std::abs(m.dy), 1.0);
    // The motion record describes the frames: curr(p) = prev(p - shift).
    const Frame w = warp(seq.hr[k - 1], m);
    if (k < 2 || k >= 5) {
      for (int r = 2; r < 62; ++r) EXPECT_EQ(w(r, 30), seq.hr[k](r, 30));
    }
  }
}

TEST(Synthetic, Deterministic) {
  const SyntheticSequence a = generate_synthetic(small_spec());
  const SyntheticSequence b = generate_synthetic(small_spec());
  EXPECT_EQ(a.hr, b.hr);
  EXPECT_EQ(a.lr, b.lr);
  SyntheticSpec other = small_spec();
  other.rng_seed = 2;
  EXPECT_NE(generate_synthetic(other).lr, a.lr);
}

TEST(Synthetic, SourceTooSmall) {
  SyntheticSpec s = small_spec();
  EXPECT_THROW(generate_synthetic(s, Frame(32, 32)), ConfigError);
  s.procedural_size = 32;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Config, ParsesFileAndOverrides) {
  const RunConfig cfg = parse_config(
      "# example\n"
      "method = mtsr\n"
      "methods = bicubic, wmtsr\n"
      "seed = 42\n"
      "seeds = 3\n"
      "synth.frames = 12\n"
      "synth.outlier = false\n"
      "srr.tap_radius = 5\n"
      "wmtsr.iterations = 3\n"
      "wmtsr.lambda_tau = 4\n"
      "mtsr.alpha = 0.01   # trailing comment\n");
  EXPECT_EQ(cfg.method, Method::Mtsr);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::Bicubic, Method::Wmtsr}));
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.synthetic.frame_count, 12);
  EXPECT_FALSE(cfg.synthetic.outlier.has_value());
  const SrrParams w = cfg.params_for(Method::Wmtsr);
  EXPECT_EQ(w.tap_radius, 5);
  EXPECT_EQ(w.J, 3);
  ASSERT_EQ(w.lambda1_schedule.size(), 3u);
  EXPECT_EQ(w.lambda1_schedule[2], Lambda1(1.0));
  EXPECT_EQ(w.lambda_tau, 4.0);
  const SrrParams m = cfg.params_for(Method::Mtsr);
  EXPECT_EQ(m.alpha, 0.01);
  EXPECT_EQ(m.tap_radius, 5);
  EXPECT_EQ(m.lambda_tau, 10.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("nonsense\n"), ConfigError);
  EXPECT_THROW(parse_config("unknown = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("srr.unknown = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("srr.alpha = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("method = cnn\n"), ConfigError);
  EXPECT_THROW(parse_config("wmtsr.lambda1 = inf, 0\n"), ConfigError);
  EXPECT_THROW(parse_config("seed = -4\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config"), ConfigError);
  RunConfig cfg = parse_config("wmtsr.lambda1 = 1, inf\nwmtsr.iterations = 2\n");
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Experiment, BicubicIdentityProtocolIsExact) {
  SyntheticSpec s = small_spec();
  s.d = 1;
  s.h = Kernel2D::delta();
  s.noise_variance = 0.0;
  const SyntheticSequence seq = generate_synthetic(s);
  SrrParams p = SrrParams::defaults_for(Method::Bicubic);
  p.d = 1;
  SrrEngine engine(Method::Bicubic, p);
  const SequenceResult r = super_resolve(engine, seq.lr, &seq.hr);
  for (const auto& m : r.metrics) EXPECT_EQ(m.mse, 0.0);
}

TEST(Experiment, BenchIsDeterministicAndConsistent) {
  RunConfig cfg = parse_config(
      "seeds = 3\n"
      "synth.window = 64\n"
      "synth.procedural_size = 96\n"
      "synth.frames = 5\n"
      "synth.outlier_size = 16\n"
      "synth.outlier_onset = 3\n"
      "synth.outlier_offset = 4\n"
      "srr.tap_radius = 4\n");
  const auto banks = prepare_filterbanks(cfg);
  const BenchReport a = run_bench(cfg, banks);
  cfg.threads = 3;
  const BenchReport b = run_bench(cfg, banks);
  ASSERT_FALSE(a.failure);
  std::ostringstream ra, rb, ta, tb;
  write_bench_report(ra, a);
  write_bench_report(rb, b);
  write_trajectory(ta, a);
  write_trajectory(tb, b);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_EQ(ta.str(), tb.str());
  // Aggregate mean equals the mean of the per-frame values.
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    for (int k = 0; k < a.frames; ++k) {
      double total = 0.0;
      for (const auto& s : a.per_seed) total += s[m][k].mse;
      EXPECT_NEAR(a.mean(m, k).mse, total / 3.0, 1e-12);
    }
  }
  std::istringstream lines(ra.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 3 * 4 * 5 + 4 * 5 + 4);
}

TEST(Experiment, StaleCacheDirectory) {
  const fs::path dir = scratch_dir("cache");
  RunConfig cfg = parse_config("method = mtsr\nmethods = mtsr\nsrr.tap_radius = 3\n");
  cfg.cache = dir.string();
  EXPECT_THROW(prepare_filterbanks(cfg), IoError);
  cache_store(cache_path(dir, Method::Mtsr), design_filterbank(design_spec_for(Method::Mtsr, cfg.params_for(Method::Mtsr))));
  EXPECT_NO_THROW(prepare_filterbanks(cfg));
  cfg.set("mtsr.alpha_t", "0.02");
  EXPECT_THROW(prepare_filterbanks(cfg), CacheStaleError);
}
