#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stfem {

inline constexpr double pi = 3.14159265358979323846;

inline std::string format_scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Bad experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration refused because it exceeds resource guardrails (CLI exit code 3).
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested certified tolerance could not be met; carries the achieved bound.
class AccuracyError : public std::runtime_error {
public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved bound " + std::to_string(achieved) + ")"),
        achieved_bound(achieved) {}
  double achieved_bound;
};

/// Linear solve failure; carries the final relative residual.
class SolveError : public std::runtime_error {
public:
  SolveError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
        relative_residual(residual) {}
  double relative_residual;
};

}  // namespace stfem
