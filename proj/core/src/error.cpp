#include "nanophase/error.hpp"

namespace nanophase {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InputFormat: return "input_format";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::AllFiltered: return "all_filtered";
    case ErrorKind::IncompatibleMerge: return "incompatible_merge";
    case ErrorKind::NumericalDegeneracy: return "numerical_degeneracy";
    case ErrorKind::EmptyComponent: return "empty_component";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::InsufficientSweep: return "insufficient_sweep";
    case ErrorKind::UnsupportedSize: return "unsupported_size";
    case ErrorKind::DegenerateSample: return "degenerate_sample";
    case ErrorKind::UndefinedFraction: return "undefined_fraction";
    case ErrorKind::Unconverged: return "unconverged";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NumericalDegeneracy:
    case ErrorKind::EmptyComponent:
    case ErrorKind::DegenerateSample:
    case ErrorKind::Unconverged:
      return 3;
    case ErrorKind::InsufficientData:
    case ErrorKind::InsufficientSweep:
      return 4;
    default:
      return 2;
  }
}

}  // namespace nanophase
