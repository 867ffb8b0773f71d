#pragma once

#include <stdexcept>
#include <string>

namespace specmap {

/// Base of every error thrown by the library. `stage()` names the pipeline
/// stage that raised it so CLI diagnostics can be tagged.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error("bounds", what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error("estimate", what) {}
};

class PlannerError : public Error {
 public:
  explicit PlannerError(const std::string& what) : Error("deploy", what) {}
};

class RecoveryError : public Error {
 public:
  explicit RecoveryError(const std::string& what) : Error("recover", what) {}
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what) : Error("metrics", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace specmap
