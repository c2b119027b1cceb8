#ifndef PADSIM_ERRORS_HPP
#define PADSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace padsim {

/// Base of every error raised by the simulation core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an input value was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A search (root, crossing, oscillation) found nothing to converge to.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not make progress.
class IntegratorError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Routes non-fatal diagnostics (degenerate kernels, boundary peaks).
/// Defaults to stderr; the C API lets callers install their own sink.
using WarningSink = void (*)(const char* message, void* user);
void set_warning_sink(WarningSink sink, void* user);
void warn(const std::string& message);

}  // namespace padsim

#endif  // PADSIM_ERRORS_HPP
