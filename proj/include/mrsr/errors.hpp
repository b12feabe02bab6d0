#pragma once

#include <stdexcept>
#include <string>

namespace mrsr {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Singular or numerically rank-deficient normal equations in filter design.
class DesignError : public Error {
 public:
  DesignError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A filterbank cache on disk was designed for a different configuration.
class CacheStaleError : public Error {
 public:
  using Error::Error;
};

class MissingDesignError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrsr
