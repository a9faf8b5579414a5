#pragma once

#include <cstdio>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace dsreg {

/// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (wrong space flag, grid mismatch).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A physical or numerical parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A step produced non-finite values.
class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

/// An iteration did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

/// The fixed-point iterate collapsed to the trivial solution.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Modulation constants are not positive for the requested system.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// A solution picked up a component along an odd (translation) kernel mode.
class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

/// Not enough data to perform a fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// The scale of a field is undefined (zero gradient).
class UndefinedScale : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text input.
class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public FormatError {
 public:
  TruncationError(const std::string& what, std::size_t expected, std::size_t actual)
      : FormatError(what), expected_(expected), actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Warnings go through a replaceable sink; the default writes to stderr.
using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline WarningSink& warning_sink() {
  static WarningSink sink = [](const std::string& msg) {
    std::fprintf(stderr, "warning: %s\n", msg.c_str());
  };
  return sink;
}
}  // namespace detail

/// Installs a new sink and returns the previous one.
inline WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(detail::warning_mutex());
  return std::exchange(detail::warning_sink(), std::move(sink));
}

inline void warn(const std::string& msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_sink()) detail::warning_sink()(msg);
}

}  // namespace dsreg
