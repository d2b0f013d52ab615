#include "gsi/error.hpp"

namespace gsi {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyDonorSet: return "EmptyDonorSet";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::InfeasibleK: return "InfeasibleK";
    case ErrorKind::MissingControl: return "MissingControl";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::DegenerateTruth: return "DegenerateTruth";
    case ErrorKind::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorKind::InfeasibleMask: return "InfeasibleMask";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicatePair: return "DuplicatePair";
  }
  return "Unknown";
}

}  // namespace gsi
