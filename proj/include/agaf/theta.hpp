#pragma once

#include <initializer_list>
#include <optional>

#include "agaf/common.hpp"

namespace agaf {

enum class ModulusPolicy {
  standard,    // q in {0} or [1e-6, 0.95]
  diagnostic,  // upper end relaxed to 0.99, for asymptotic probes only
};

// Fixed modulus q of the annulus q < |z| < 1 together with the nome p = q^2.
// q = 0 is admitted as the disk limit. Caches (p;p)_inf.
class Nome {
 public:
  explicit Nome(double q, ModulusPolicy policy = ModulusPolicy::standard, double eps = 1e-14);

  double q() const noexcept { return q_; }
  double p() const noexcept { return p_; }
  double eps() const noexcept { return eps_; }
  int order() const noexcept { return order_; }
  // q0 = (q^2; q^2)_inf
  double q0() const noexcept { return q0_; }
  // |tau_q| = -log(q)/pi; infinite in the disk limit
  double tau_abs() const noexcept { return tau_abs_; }
  bool is_disk() const noexcept { return q_ == 0.0; }

 private:
  double q_, p_, eps_;
  int order_;
  double q0_, tau_abs_;
};

// N = ceil(log eps / log p), clamped to [8, 20000].
int truncation_order(double p, double eps = 1e-14);

// (a; p)_n, or the infinite product when n is empty.
cplx qpoch(cplx a, double p, std::optional<int> n = std::nullopt);

// theta(z; p) = (z; p)_inf (p/z; p)_inf
cplx theta(cplx z, double p);
inline cplx theta(cplx z, const Nome& nm) { return theta(z, nm.p()); }

// theta(z1, ..., zn) as a product
cplx theta(std::initializer_list<cplx> zs, double p);
inline cplx theta(std::initializer_list<cplx> zs, const Nome& nm) { return theta(zs, nm.p()); }

double theta_prime_at_one(double p);

// a_n(z) = (z d/dz)^n log theta(z; p), n = 1..4
cplx log_theta_deriv(int n, cplx z, double p);

// |value| < 1e-13 (1 + |z|)
bool is_theta_zero(cplx value, cplx z) noexcept;

}  // namespace agaf
