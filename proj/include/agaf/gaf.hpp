#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agaf/common.hpp"

namespace agaf {

// Truncated Laurent series sum_{n = min_mode}^{max_mode} c_n z^n.
struct LaurentSample {
  std::vector<cplx> coeffs;  // coeffs[n - min_mode]
  int min_mode = 0;
  int max_mode = 0;
  double q = 0.0;
  double r = 0.0;
  std::uint64_t seed = 0;
  bool truncated = true;  // a cut-off random series, subject to the tail check

  cplx coeff(int n) const { return coeffs.at(static_cast<std::size_t>(n - min_mode)); }
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  // sum |c_n| |z|^n, the scale residuals are measured against
  double scale(cplx z) const;
};

// Unit complex Gaussians, E|zeta|^2 = 1. Replica k of seed s always draws the same stream.
LaurentSample sample_gaf_annulus(double q, double r, int N, std::uint64_t seed, std::uint64_t replica = 0);
LaurentSample sample_gaf_disk(double r, int N, std::uint64_t seed, std::uint64_t replica = 0);
LaurentSample sample_gaf2_annulus(double q, int N, std::uint64_t seed, std::uint64_t replica = 0);
// Fixed coefficients, for solver checks.
LaurentSample deterministic_sample(std::vector<cplx> coeffs, int min_mode, double q);

// 0.2 (1 - q); the contract needs delta < (1 - q)/4
double default_margin(double q);
// smallest N with the term ratio at the margin radii below 1e-12, capped at 600
int default_modes(double q, double delta);
// Geometric bound on the discarded tail at radii q + delta and 1 - delta, for unit-scale terms.
double truncation_tail(double q, double r, int N, double delta);

enum class RootSolver { automatic, companion, aberth };

// Roots of sum_k a_k z^k, a given in ascending order.
std::vector<cplx> polynomial_roots(std::span<const cplx> a, RootSolver solver = RootSolver::automatic);

struct ZeroSet {
  std::vector<cplx> zeros;
  double inner = 0.0;  // q + delta (0 in the disk)
  double outer = 1.0;  // 1 - delta
  double residual_max = 0.0;
};

ZeroSet find_zeros(const LaurentSample& sample, double delta, RootSolver solver = RootSolver::automatic);

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct McConfig {
  double q = 0.3;
  double r = 0.3;
  int n_samples = 1000;
  std::uint64_t seed = 42;
  double delta = 0.0;  // 0 picks default_margin
  int modes = 0;       // 0 picks default_modes
  Exec exec = Exec::parallel;
};

struct DensityBin {
  double lo, hi;
  EstimateWithError estimate;
  double analytic;  // bin average of rho^1
  double z_score;
};

// Radial histogram of zeros normalised by m/pi. q = 0 runs the disk GAF and
// starts the first bin at the origin.
std::vector<DensityBin> mc_density(const McConfig& cfg, int radial_bins);

struct PairGeometry {
  double x = 0.95;
  double half_width = 0.006;  // radial half-width of each cell
  int rotations = 8;          // cells per ring; antipodal cells are paired
};

struct PairEstimate {
  EstimateWithError estimate;  // cell-averaged unfolded rho^2
  double analytic;             // G_vee(x; r)
  std::size_t joint_events;
};

PairEstimate mc_pair_statistic(const McConfig& cfg, const PairGeometry& geometry);

struct CovarianceCheck {
  double max_residual = 0.0;  // standardized, over Re and Im of every probe pair
  std::size_t n_samples = 0;
  bool anchors_vanish = true;  // Y(alpha) == 0 in every sample
};

// Samples Y = gamma * X^{r prod|alpha|^2} at the probes and compares the
// empirical covariance with the conditional kernel of S(., .; r).
CovarianceCheck conditional_covariance_check(const McConfig& cfg, std::span<const cplx> anchors,
                                             std::span<const cplx> probes);

}  // namespace agaf
