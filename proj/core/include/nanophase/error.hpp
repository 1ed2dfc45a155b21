#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nanophase {

/// Failure categories surfaced by the library. Each maps onto one CLI exit code.
enum class ErrorKind {
  InputFormat,          // malformed header, bad flag values, mismatched lengths
  EmptyInput,           // nothing to work on
  AllFiltered,          // a cleaning filter removed every record
  IncompatibleMerge,    // datasets cleaned with different filters
  NumericalDegeneracy,  // singular covariance, density underflow, all restarts dead
  EmptyComponent,       // a mixture component lost all of its responsibility mass
  InsufficientData,     // fewer points than the requested model needs
  InsufficientSweep,    // margin requested on fewer than two successful fits
  UnsupportedSize,      // Shapiro-Wilk outside 3..5000
  DegenerateSample,     // zero-variance series
  UndefinedFraction,    // volume fraction of a single-component fit
  Unconverged,          // report requested on a fit that did not converge
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit status for a failure kind: 2 input, 3 numerical, 4 insufficient data.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by clean() when nothing survives; carries the retention ratio (always 0).
class AllFilteredError : public Error {
 public:
  AllFilteredError(const std::string& message, double retention)
      : Error(ErrorKind::AllFiltered, message), retention_(retention) {}

  double retention() const noexcept { return retention_; }

 private:
  double retention_;
};

}  // namespace nanophase
