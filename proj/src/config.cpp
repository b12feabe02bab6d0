#include "mrsr/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
}

long long to_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const long long v = to_integer(key, value);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("'" + key + "' out of range");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-') throw ConfigError("'" + key + "' expects an unsigned integer");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an unsigned integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

Lambda1 to_lambda1(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "infinity") return Lambda1::infinity();
  const double v = to_double(key, value);
  if (std::isinf(v) && v > 0) return Lambda1::infinity();
  if (!(v > 0.0)) throw ConfigError("'" + key + "' values must be positive or inf");
  return Lambda1(v);
}

bool is_method_name(const std::string& ns) {
  return ns == "bicubic" || ns == "ltsr" || ns == "mtsr" || ns == "wmtsr";
}

}  // namespace

void apply_solver_setting(SrrParams& p, const std::string& key, const std::string& value) {
  if (key == "alpha") p.alpha = to_double(key, value);
  else if (key == "alpha_t") p.alphaT = to_double(key, value);
  else if (key == "lambda_tau") p.lambda_tau = to_double(key, value);
  else if (key == "threshold") {
    if (value == "hard") p.p = ThresholdKind::Hard;
    else if (value == "soft") p.p = ThresholdKind::Soft;
    else throw ConfigError("'threshold' expects hard or soft, got '" + value + "'");
  } else if (key == "hard_rule") {
    if (value == "magnitude") p.hard_rule = HardRule::Magnitude;
    else if (value == "literal") p.hard_rule = HardRule::Literal;
    else throw ConfigError("'hard_rule' expects magnitude or literal, got '" + value + "'");
  } else if (key == "iterations") {
    p.J = to_int(key, value);
    if (p.J >= 1 && static_cast<int>(p.lambda1_schedule.size()) != p.J) p.lambda1_schedule = default_schedule(p.J);
  } else if (key == "lambda1") {
    p.lambda1_schedule.clear();
    for (const auto& item : split_list(value)) p.lambda1_schedule.push_back(to_lambda1(key, item));
  } else if (key == "mu") {
    p.mu = to_double(key, value);
  } else if (key == "baseline_iterations") {
    p.J_baseline = to_int(key, value);
  } else if (key == "tap_radius") {
    p.tap_radius = to_int(key, value);
  } else if (key == "laplacian_scale") {
    const double v = to_double(key, value);
    if (!(v > 0.0)) throw ConfigError("'laplacian_scale' must be positive");
    p.s = laplacian_kernel(v);
  } else if (key == "ridge") {
    p.ridge = to_double(key, value);
  } else if (key == "wavelet_levels") {
    p.wavelet.levels = to_int(key, value);
  } else if (key == "wavelet_mode") {
    if (value == "cycle_spinning") p.wavelet.mode = WaveletMode::CycleSpinning;
    else if (value == "decimated") p.wavelet.mode = WaveletMode::Decimated;
    else throw ConfigError("'wavelet_mode' expects cycle_spinning or decimated, got '" + value + "'");
  } else if (key == "motion") {
    if (value == "global") p.motion = MotionModel::GlobalShift;
    else if (value == "dense") p.motion = MotionModel::DenseFlow;
    else throw ConfigError("'motion' expects global or dense, got '" + value + "'");
  } else if (key == "flow_lambda") {
    p.flow.lambda_smooth = to_double(key, value);
  } else if (key == "flow_levels") {
    p.flow.pyramid_levels = to_int(key, value);
  } else if (key == "flow_spacing") {
    p.flow.pyramid_spacing = to_double(key, value);
  } else if (key == "flow_iterations") {
    p.flow.iterations_per_level = to_int(key, value);
  } else {
    throw ConfigError("unknown solver key '" + key + "'");
  }
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string ns = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (ns == "srr" || is_method_name(ns)) {
      SrrParams probe;
      apply_solver_setting(probe, name, value);  // rejects bad keys and values early
      solver_settings[key] = value;
      return;
    }
    if (ns == "synth") {
      SyntheticSpec& s = synthetic;
      if (name == "source") s.source_image = value.empty() ? std::nullopt : std::optional<std::string>(value);
      else if (name == "procedural_size") s.procedural_size = to_int(key, value);
      else if (name == "window") s.window = to_int(key, value);
      else if (name == "frames") s.frame_count = to_int(key, value);
      else if (name == "noise_variance") s.noise_variance = to_double(key, value);
      else if (name == "outlier") {
        if (to_bool(key, value)) {
          if (!s.outlier) s.outlier = OutlierSpec{};
        } else {
          s.outlier.reset();
        }
      } else if (name == "outlier_size" || name == "outlier_value" || name == "outlier_onset" ||
                 name == "outlier_offset") {
        if (!s.outlier) s.outlier = OutlierSpec{};
        if (name == "outlier_size") s.outlier->size = to_int(key, value);
        else if (name == "outlier_value") s.outlier->value = to_double(key, value);
        else if (name == "outlier_onset") s.outlier->onset = to_int(key, value);
        else s.outlier->offset = to_int(key, value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
      return;
    }
    throw ConfigError("unknown key '" + key + "'");
  }
  if (key == "method") method = parse_method(value);
  else if (key == "methods") {
    methods.clear();
    for (const auto& m : split_list(value)) methods.push_back(parse_method(m));
  } else if (key == "scale") scale = to_int(key, value);
  else if (key == "blur_size") blur_size = to_int(key, value);
  else if (key == "seed") seed = to_u64(key, value);
  else if (key == "seeds") seeds = to_int(key, value);
  else if (key == "threads") threads = to_int(key, value);
  else if (key == "frames") frames = value;
  else if (key == "reference") reference = value;
  else if (key == "out") out = value;
  else if (key == "report") report = value;
  else if (key == "trajectory") trajectory = value;
  else if (key == "cache") cache = value;
  else if (key == "format") format = parse_format(value);
  else throw ConfigError("unknown key '" + key + "'");
}

SrrParams RunConfig::params_for(Method m) const {
  SrrParams p = SrrParams::defaults_for(m);
  p.d = scale;
  p.h = uniform_blur_kernel(blur_size);
  for (const auto& [key, value] : solver_settings) {
    if (key.rfind("srr.", 0) == 0) apply_solver_setting(p, key.substr(4), value);
  }
  const std::string ns = to_string(m) + ".";
  for (const auto& [key, value] : solver_settings) {
    if (key.rfind(ns, 0) == 0) apply_solver_setting(p, key.substr(ns.size()), value);
  }
  return p;
}

SyntheticSpec RunConfig::synthetic_for(std::uint64_t s) const {
  SyntheticSpec spec = synthetic;
  spec.d = scale;
  spec.h = uniform_blur_kernel(blur_size);
  spec.rng_seed = s;
  return spec;
}

void RunConfig::validate() const {
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (blur_size < 1 || blur_size % 2 == 0) throw ConfigError("blur_size must be a positive odd integer");
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (methods.empty()) throw ConfigError("methods must name at least one method");
  for (Method m : {Method::Bicubic, Method::Ltsr, Method::Mtsr, Method::Wmtsr}) params_for(m).validate();
  synthetic_for(seed).validate();
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace mrsr
