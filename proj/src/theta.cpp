#include "agaf/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace agaf {

namespace {

constexpr double kNegligible = 1e-17;
constexpr int kMaxFactors = 2'000'000;

// D_u^n log(1-u) = -u E_{n-1}(u) / (1-u)^n with Eulerian polynomials E.
cplx log1m_deriv(int n, cplx u) {
  const cplx w = 1.0 - u;
  switch (n) {
    case 1: return -u / w;
    case 2: return -u / (w * w);
    case 3: return -u * (1.0 + u) / (w * w * w);
    default: return -u * (1.0 + 4.0 * u + u * u) / (w * w * w * w);
  }
}

}  // namespace

int truncation_order(double p, double eps) {
  if (p <= 0.0) return 8;
  const double n = std::ceil(std::log(eps) / std::log(p));
  return static_cast<int>(std::clamp(n, 8.0, 20000.0));
}

Nome::Nome(double q, ModulusPolicy policy, double eps) : q_(q), p_(q * q), eps_(eps) {
  const double upper = policy == ModulusPolicy::diagnostic ? 0.99 : 0.95;
  const bool ok = q == 0.0 || (q >= 1e-6 && q <= upper);
  require(ok, Errc::UnsupportedModulus, "q outside admitted range");
  order_ = truncation_order(p_, eps_);
  q0_ = qpoch(p_, p_).real();
  tau_abs_ = q == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(q) / std::numbers::pi;
}

cplx qpoch(cplx a, double p, std::optional<int> n) {
  require(p < 1.0, Errc::NonConvergent, "qpoch needs p < 1");
  require(p >= 0.0, Errc::OutOfRange, "qpoch needs p >= 0");
  cplx prod = 1.0;
  cplx ap = a;
  if (n) {
    for (int i = 0; i < *n; ++i, ap *= p) prod *= 1.0 - ap;
    return prod;
  }
  if (p == 0.0) return 1.0 - a;
  const int order = truncation_order(p);
  for (int i = 0; i < kMaxFactors; ++i) {
    prod *= 1.0 - ap;
    ap *= p;
    if (i + 1 >= order && std::abs(ap) < kNegligible) return prod;
  }
  throw Error(Errc::NonConvergent, "qpoch did not reach tolerance");
}

cplx theta(cplx z, double p) {
  require(z != 0.0, Errc::ZeroArgument, "theta at z = 0");
  if (p == 0.0) return 1.0 - z;
  return qpoch(z, p) * qpoch(p / z, p);
}

cplx theta(std::initializer_list<cplx> zs, double p) {
  cplx prod = 1.0;
  for (cplx z : zs) prod *= theta(z, p);
  return prod;
}

double theta_prime_at_one(double p) {
  const double pp = qpoch(p, p).real();
  return -pp * pp;
}

bool is_theta_zero(cplx value, cplx z) noexcept {
  return std::abs(value) < 1e-13 * (1.0 + std::abs(z));
}

cplx log_theta_deriv(int n, cplx z, double p) {
  require(n >= 1 && n <= 4, Errc::OutOfRange, "log_theta_deriv order must be 1..4");
  require(is_theta_zero(theta(z, p), z) == false, Errc::PoleAtZero, "a_n at a zero of theta");
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  cplx sum = log1m_deriv(n, z);
  if (p == 0.0) return sum;
  const int order = truncation_order(p);
  cplx up = z * p;
  cplx vp = p / z;
  for (int i = 1; i < kMaxFactors; ++i) {
    sum += log1m_deriv(n, up) + sign * log1m_deriv(n, vp);
    up *= p;
    vp *= p;
    if (i >= order && std::abs(up) < kNegligible && std::abs(vp) < kNegligible) return sum;
  }
  throw Error(Errc::NonConvergent, "a_n series did not converge");
}

}  // namespace agaf
