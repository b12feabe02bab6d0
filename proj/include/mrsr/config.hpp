#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrsr/sequence_io.hpp"
#include "mrsr/srr.hpp"
#include "mrsr/synthetic.hpp"

namespace mrsr {

// Experiment configuration. Loaded from a `key = value` file (see README for
// the schema); command-line flags are applied afterwards through set().
struct RunConfig {
  Method method = Method::Wmtsr;
  std::vector<Method> methods{Method::Bicubic, Method::Ltsr, Method::Mtsr, Method::Wmtsr};
  int scale = 2;
  int blur_size = 3;
  std::uint64_t seed = 1;
  int seeds = 10;
  int threads = 1;

  std::string frames;
  std::string reference;
  std::string out;
  std::string report;
  std::string trajectory;
  std::string cache;
  SequenceFormat format = SequenceFormat::Pgm;

  SyntheticSpec synthetic;

  // Solver settings: "srr.<key>" applies to every method, "<method>.<key>"
  // to one method and wins over the shared form.
  std::map<std::string, std::string> solver_settings;

  void set(const std::string& key, const std::string& value);
  // Published defaults for `m` with the solver settings applied.
  SrrParams params_for(Method m) const;
  // Synthetic spec with the shared scale and blur applied.
  SyntheticSpec synthetic_for(std::uint64_t seed) const;
  void validate() const;
};

RunConfig load_config(const std::string& path);
// Parses config text; `origin` names the source in error messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

// Applies one solver key (without namespace) to params.
void apply_solver_setting(SrrParams& params, const std::string& key, const std::string& value);

}  // namespace mrsr
