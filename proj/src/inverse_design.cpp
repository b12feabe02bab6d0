#include "mrsr/inverse_design.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'F', 'B'};
constexpr std::uint16_t kVersion = 1;

// Condition estimates above this are treated as numerically singular.
constexpr double kMaxCondition = 1e13;

class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u16(std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>(v >> 8)};
    bytes(b, 2);
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    bytes(b, 8);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_fields(int d, int tap_radius, double alphaT, double ridge, const std::vector<double>& lambdas) {
  Fnv1a f;
  f.bytes(kMagic, 4);
  f.u16(static_cast<std::uint16_t>(d));
  f.u16(static_cast<std::uint16_t>(tap_radius));
  f.f64(alphaT);
  f.f64(ridge);
  f.u16(static_cast<std::uint16_t>(lambdas.size()));
  for (double l : lambdas) f.f64(l);
  return f.value();
}

// Little-endian byte writer/reader for the cache format.
class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<char>(v & 0xff));
    buf_.push_back(static_cast<char>(v >> 8));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : buf_(std::move(bytes)) {}
  void raw(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint16_t u16() {
    need(2);
    const auto lo = static_cast<unsigned char>(buf_[pos_]);
    const auto hi = static_cast<unsigned char>(buf_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw ParseError("filterbank cache: unexpected end of file");
  }
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

int max_entry_radius(const PolyphaseMatrix& t) {
  int r = 0;
  for (int i = 0; i < t.channels(); ++i) {
    for (int j = 0; j < t.channels(); ++j) {
      const Kernel2D& k = t.entry(i, j);
      r = std::max({r, std::abs(k.min_row_offset()), std::abs(k.max_row_offset()), std::abs(k.min_col_offset()),
                    std::abs(k.max_col_offset())});
    }
  }
  return r;
}

}  // namespace

std::optional<std::string> DesignSpec::warning() const {
  const PolyphaseMatrix t = build_system_transfer(lambda1_values.front(), alphaT, h, s, DecimationSpec(d), ridge);
  const int support = max_entry_radius(t);
  if (tap_radius < support) {
    return "tap_radius " + std::to_string(tap_radius) + " is smaller than the system support radius " +
           std::to_string(support);
  }
  return std::nullopt;
}

InverseDesign design_inverse(const PolyphaseMatrix& transfer, int tap_radius) {
  if (tap_radius < 1) throw InvalidArgument("design_inverse: tap_radius must be >= 1");
  const int n = transfer.channels();
  const int width = 2 * tap_radius + 1;
  const int taps = width * width;
  const int unknowns = n * taps;
  const int span = 2 * tap_radius;  // |p - p'| <= 2r
  const int corr_width = 2 * span + 1;

  // corr[m][m'](delta) = sum_j sum_t T_{m,j}(t) T_{m',j}(t + delta)
  std::vector<Eigen::MatrixXd> corr(static_cast<std::size_t>(n) * n, Eigen::MatrixXd::Zero(corr_width, corr_width));
  for (int m = 0; m < n; ++m) {
    for (int mp = 0; mp < n; ++mp) {
      Eigen::MatrixXd& c = corr[static_cast<std::size_t>(m) * n + mp];
      for (int j = 0; j < n; ++j) {
        const Kernel2D& a = transfer.entry(m, j);
        const Kernel2D& b = transfer.entry(mp, j);
        for (int ar = 0; ar < a.rows(); ++ar) {
          for (int ac = 0; ac < a.cols(); ++ac) {
            const double va = a.taps()(ar, ac);
            if (va == 0.0) continue;
            const int tr = ar - a.origin()[0];
            const int tc = ac - a.origin()[1];
            for (int br = 0; br < b.rows(); ++br) {
              for (int bc = 0; bc < b.cols(); ++bc) {
                const double vb = b.taps()(br, bc);
                if (vb == 0.0) continue;
                const int dr = (br - b.origin()[0]) - tr;
                const int dc = (bc - b.origin()[1]) - tc;
                if (std::abs(dr) > span || std::abs(dc) > span) continue;
                c(dr + span, dc + span) += va * vb;
              }
            }
          }
        }
      }
    }
  }

  Eigen::MatrixXd normal(unknowns, unknowns);
  for (int m = 0; m < n; ++m) {
    for (int mp = 0; mp < n; ++mp) {
      const Eigen::MatrixXd& c = corr[static_cast<std::size_t>(m) * n + mp];
      for (int p = 0; p < taps; ++p) {
        const int pr = p / width - tap_radius;
        const int pc = p % width - tap_radius;
        for (int pp = 0; pp < taps; ++pp) {
          const int ppr = pp / width - tap_radius;
          const int ppc = pp % width - tap_radius;
          normal(m * taps + p, mp * taps + pp) = c(pr - ppr + span, pc - ppc + span);
        }
      }
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  // rcond alone misses exactly zero pivots, which LDLT treats as a
  // pseudo-inverse; the pivot spread catches them.
  const double rcond = ldlt.rcond();
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const double pivot_spread =
      pivots.minCoeff() > 0.0 ? pivots.maxCoeff() / pivots.minCoeff() : std::numeric_limits<double>::infinity();
  const double condition =
      std::max(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity(), pivot_spread);
  if (ldlt.info() != Eigen::Success || !(condition < kMaxCondition)) {
    throw DesignError("design_inverse: normal equations are singular or ill-conditioned (condition estimate " +
                          std::to_string(condition) + ")",
                      condition);
  }

  InverseDesign out{PolyphaseMatrix(transfer.d()), 0.0, {}};
  for (int i = 0; i < n; ++i) {
    // rhs(m, p) = T_{m,i}(-p)
    Eigen::VectorXd rhs(unknowns);
    for (int m = 0; m < n; ++m) {
      for (int p = 0; p < taps; ++p) {
        rhs(m * taps + p) = transfer.entry(m, i).at(-(p / width - tap_radius), -(p % width - tap_radius));
      }
    }
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    for (int m = 0; m < n; ++m) {
      Frame t(width, width);
      for (int p = 0; p < taps; ++p) t(p / width, p % width) = sol(m * taps + p);
      out.inverse.entry(i, m) = Kernel2D::centered(std::move(t));
    }
    out.condition.push_back(condition);
  }
  if (!out.inverse.all_finite()) throw DesignError("design_inverse: non-finite solution", condition);
  out.residual = compose(out.inverse, transfer).distance_to_identity();
  return out;
}

InverseValidation validate_inverse(const PolyphaseMatrix& inverse, const PolyphaseMatrix& transfer, int trials,
                                   std::uint64_t seed, int frame_size) {
  if (inverse.d() != transfer.d()) throw InvalidArgument("validate_inverse: decimation factors differ");
  InverseValidation report;
  report.coefficient_residual = compose(inverse, transfer).distance_to_identity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int size = ((frame_size + inverse.d() - 1) / inverse.d()) * inverse.d();
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Frame x(size, size);
    for (double& v : x.values()) v = noise(rng);
    const Frame back = apply_polyphase(inverse, apply_polyphase(transfer, x));
    const double rel = norm2(back - x) / norm2(x);
    report.max_relative_error = std::max(report.max_relative_error, rel);
    total += rel;
  }
  if (trials > 0) report.mean_relative_error = total / trials;
  return report;
}

const FilterbankRecord* InverseFilterbankCache::find(Lambda1 lambda1) const {
  for (const auto& r : records) {
    if (r.lambda1 == lambda1) return &r;
  }
  return nullptr;
}

std::uint64_t InverseFilterbankCache::design_spec_hash() const {
  std::vector<double> lambdas;
  for (const auto& r : records) lambdas.push_back(r.lambda1.encoded());
  return hash_fields(d, tap_radius, alphaT, ridge, lambdas);
}

std::uint64_t design_spec_hash(const DesignSpec& spec) {
  std::vector<double> lambdas;
  for (const auto& l : spec.lambda1_values) lambdas.push_back(l.encoded());
  return hash_fields(spec.d, spec.tap_radius, spec.alphaT, spec.ridge, lambdas);
}

InverseFilterbankCache design_filterbank(const DesignSpec& spec) {
  if (spec.lambda1_values.empty()) throw InvalidArgument("design_filterbank: no lambda1 values");
  InverseFilterbankCache cache;
  cache.d = spec.d;
  cache.tap_radius = spec.tap_radius;
  cache.alphaT = spec.alphaT;
  cache.ridge = spec.ridge;
  const DecimationSpec dec(spec.d);
  for (const Lambda1& lambda : spec.lambda1_values) {
    const PolyphaseMatrix t = build_system_transfer(lambda, spec.alphaT, spec.h, spec.s, dec, spec.ridge);
    InverseDesign design = design_inverse(t, spec.tap_radius);
    cache.records.push_back({lambda, std::move(design.inverse), design.residual});
  }
  return cache;
}

void cache_store(const std::filesystem::path& path, const InverseFilterbankCache& cache) {
  const int r = cache.tap_radius;
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kVersion);
  w.u16(static_cast<std::uint16_t>(cache.d));
  w.u16(static_cast<std::uint16_t>(r));
  w.f64(cache.alphaT);
  w.f64(cache.ridge);
  w.u16(static_cast<std::uint16_t>(cache.records.size()));
  for (const auto& rec : cache.records) {
    if (rec.inverse.d() != cache.d) throw InvalidArgument("cache_store: record decimation factor mismatch");
    w.f64(rec.lambda1.encoded());
    w.f64(rec.residual);
    for (int i = 0; i < rec.inverse.channels(); ++i) {
      for (int j = 0; j < rec.inverse.channels(); ++j) {
        const Kernel2D k = rec.inverse.entry(i, j).padded_to(-r, r, -r, r);
        for (double v : k.taps().values()) w.f64(v);
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cache_store: cannot open " + path.string() + " for writing");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("cache_store: write failed for " + path.string());
}

InverseFilterbankCache cache_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cache_load: cannot open " + path.string());
  Reader rd(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

  char magic[4];
  rd.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("filterbank cache: bad magic bytes");
  if (const auto version = rd.u16(); version != kVersion) {
    throw ParseError("filterbank cache: unsupported version " + std::to_string(version));
  }
  InverseFilterbankCache cache;
  cache.d = rd.u16();
  cache.tap_radius = rd.u16();
  cache.alphaT = rd.f64();
  cache.ridge = rd.f64();
  const int count = rd.u16();
  if (cache.d < 1) throw ParseError("filterbank cache: decimation factor must be >= 1");
  const int width = 2 * cache.tap_radius + 1;
  const int channels = cache.d * cache.d;
  for (int n = 0; n < count; ++n) {
    const double lambda = rd.f64();
    if (!(lambda > 0.0)) throw ParseError("filterbank cache: invalid lambda1 value");
    FilterbankRecord rec{Lambda1::from_encoded(lambda), PolyphaseMatrix(cache.d), rd.f64()};
    for (int i = 0; i < channels; ++i) {
      for (int j = 0; j < channels; ++j) {
        Frame t(width, width);
        for (double& v : t.values()) v = rd.f64();
        rec.inverse.entry(i, j) = Kernel2D::centered(std::move(t));
      }
    }
    cache.records.push_back(std::move(rec));
  }
  if (!rd.at_end()) throw ParseError("filterbank cache: trailing bytes after last record");
  return cache;
}

InverseFilterbankCache cache_load(const std::filesystem::path& path, const DesignSpec& expected) {
  InverseFilterbankCache cache = cache_load(path);
  if (cache.design_spec_hash() != design_spec_hash(expected)) {
    throw CacheStaleError("filterbank cache " + path.string() +
                          " was designed for a different configuration; rerun `mrsr design`");
  }
  // The header does not carry h and s; a residual that no longer reproduces
  // means the kernels changed.
  const DecimationSpec dec(expected.d);
  for (const auto& rec : cache.records) {
    const PolyphaseMatrix t =
        build_system_transfer(rec.lambda1, expected.alphaT, expected.h, expected.s, dec, expected.ridge);
    const double residual = compose(rec.inverse, t).distance_to_identity();
    if (!(std::abs(residual - rec.residual) <= 1e-9 * std::max(1.0, rec.residual))) {
      throw CacheStaleError("filterbank cache " + path.string() +
                            " was designed for different blur or regularisation kernels; rerun `mrsr design`");
    }
  }
  return cache;
}

}  // namespace mrsr
