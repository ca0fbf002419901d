#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agaf {

using cplx = std::complex<double>;

enum class Errc {
  NonConvergent,
  ZeroArgument,
  PoleAtZero,
  UnsupportedModulus,
  PoleAtLattice,
  OutOfBranch,
  OutOfAnnulus,
  PoleAtPowerOfQ,
  OutOfDomain,
  DegenerateAnchor,
  DimensionMismatch,
  OutOfDisk,
  OutOfRange,
  TruncationInsufficient,
  NonConvergedRoot,
  InsufficientStatistics,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool ok, Errc code, const char* detail) {
  if (!ok) throw Error(code, detail);
}

// Which side of a domain a computation lives on. Disk mode uses the q -> 0
// closed forms directly.
enum class Domain { disk, annulus };

// Serial reference vs OpenMP fan-out; both must give identical results.
enum class Exec { serial, parallel };

}  // namespace agaf
