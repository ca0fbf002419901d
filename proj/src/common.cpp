#include "agaf/common.hpp"

namespace agaf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::ZeroArgument: return "ZeroArgument";
    case Errc::PoleAtZero: return "PoleAtZero";
    case Errc::UnsupportedModulus: return "UnsupportedModulus";
    case Errc::PoleAtLattice: return "PoleAtLattice";
    case Errc::OutOfBranch: return "OutOfBranch";
    case Errc::OutOfAnnulus: return "OutOfAnnulus";
    case Errc::PoleAtPowerOfQ: return "PoleAtPowerOfQ";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::DegenerateAnchor: return "DegenerateAnchor";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::OutOfDisk: return "OutOfDisk";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::TruncationInsufficient: return "TruncationInsufficient";
    case Errc::NonConvergedRoot: return "NonConvergedRoot";
    case Errc::InsufficientStatistics: return "InsufficientStatistics";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace agaf
