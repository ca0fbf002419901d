#include "agaf/elliptic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace agaf {

namespace {

using std::numbers::pi;
constexpr double kNegligible = 1e-17;
constexpr int kMaxTerms = 10'000'000;
constexpr cplx I{0.0, 1.0};

// sum_{n>=1} x^n / (1 - x^n)^2 style Lambert sums with sign s on the denominator
double lambert_sq(double x, double s) {
  double sum = 0.0;
  double xn = x;
  for (int n = 1; n < kMaxTerms && xn > kNegligible; ++n, xn *= x) {
    const double d = 1.0 - s * xn;
    sum += xn / (d * d);
  }
  return sum;
}

// sum_{n>=1} x^{2n-1} / (1 - s x^{2n-1})^2
double lambert_sq_odd(double x, double s) {
  double sum = 0.0;
  double xn = x;
  for (int n = 1; n < kMaxTerms && xn > kNegligible; ++n, xn *= x * x) {
    const double d = 1.0 - s * xn;
    sum += xn / (d * d);
  }
  return sum;
}

cplx g0(cplx u) { return u / ((1.0 - u) * (1.0 - u)); }
cplx g1(cplx u) {
  const cplx w = 1.0 - u;
  return u * (1.0 + u) / (w * w * w);
}
cplx g2(cplx u) {
  const cplx w = 1.0 - u;
  return u * (1.0 + 4.0 * u + u * u) / (w * w * w * w);
}

// Shift phi into the period cell centred at 0 and refuse points near the
// lattice.
cplx reduce_phi(cplx phi, const Nome& nm) {
  double re = phi.real() - 2.0 * pi * std::round(phi.real() / (2.0 * pi));
  double im = phi.imag();
  if (!nm.is_disk()) {
    const double period = -2.0 * std::log(nm.q());
    im -= period * std::round(im / period);
  }
  const cplx out{re, im};
  require(std::abs(out) >= 1e-8, Errc::PoleAtLattice, "wp evaluated at a lattice point");
  return out;
}

template <class Term>
void lattice_sum(cplx z, const Nome& nm, Term&& term) {
  if (nm.is_disk()) return;
  const double p = nm.p();
  const double spread = std::max(std::abs(z), 1.0 / std::abs(z));
  cplx u = z * p;
  cplx v = p / z;
  double pn = p;
  for (int n = 1; n < kMaxTerms; ++n) {
    term(u, v);
    u *= p;
    v *= p;
    pn *= p;
    if (n >= nm.order() && pn * spread < kNegligible) return;
  }
  throw Error(Errc::NonConvergent, "lattice sum did not converge");
}

}  // namespace

SpecialValues special_values(const Nome& nm) {
  const double q = nm.q();
  const double p = nm.p();
  const double c2 = lambert_sq(p, 1.0);
  const double e1 = 1.0 / 6.0 + 2.0 * c2 + 2.0 * lambert_sq(p, -1.0);
  const double e2 = -1.0 / 12.0 + 2.0 * c2 + 2.0 * lambert_sq_odd(q, -1.0);
  const double e3 = -1.0 / 12.0 + 2.0 * c2 - 2.0 * lambert_sq_odd(q, 1.0);
  return {e1, e2, e3, 2.0 * (e1 * e1 + e2 * e2 + e3 * e3), 4.0 * e1 * e2 * e3, 1.0 - 24.0 * c2};
}

HalfPeriodGaps half_period_gaps(const Nome& nm) {
  const double q = nm.q(), p = nm.p();
  if (nm.is_disk()) return {0.25, 0.0};
  const double e = nm.q0();
  const double th4 = e * std::pow(qpoch(q, p).real(), 2);
  const double th2 = 2.0 * std::pow(q, 0.25) * e * std::pow(qpoch(-p, p).real(), 2);
  return {0.25 * std::pow(th4, 4), 0.25 * std::pow(th2, 4)};
}

cplx wp(cplx phi, const Nome& nm) {
  phi = reduce_phi(phi, nm);
  const cplx z = std::exp(I * phi);
  const cplx s = std::sin(phi / 2.0);
  cplx sum = -1.0 / 12.0 + 2.0 * lambert_sq(nm.p(), 1.0) + 1.0 / (4.0 * s * s);
  lattice_sum(z, nm, [&](cplx u, cplx v) { sum -= g0(u) + g0(v); });
  return sum;
}

WpDerivs wp_derivs(cplx phi, const Nome& nm) {
  phi = reduce_phi(phi, nm);
  const cplx z = std::exp(I * phi);
  const cplx s = std::sin(phi / 2.0);
  const cplx c = std::cos(phi / 2.0);
  cplx odd = 0.0;
  cplx even = (1.0 + 2.0 * c * c) / (8.0 * s * s * s * s);
  lattice_sum(z, nm, [&](cplx u, cplx v) {
    odd += g1(u) - g1(v);
    even += g2(u) + g2(v);
  });
  return {-c / (4.0 * s * s * s) - I * odd, even};
}

cplx wp_imaginary(cplx phi, const Nome& nm) {
  require(!nm.is_disk(), Errc::UnsupportedModulus, "imaginary transformation needs q > 0");
  const double re = phi.real() - 2.0 * pi * std::round(phi.real() / (2.0 * pi));
  phi = {re, phi.imag()};
  require(std::abs(phi) >= 1e-8, Errc::PoleAtLattice, "wp evaluated at a lattice point");
  const double t = nm.tau_abs();
  const double Q = std::exp(-2.0 * pi / t);
  const cplx sh = std::sinh(phi / (2.0 * t));
  cplx sum = 1.0 / 12.0 + 1.0 / (4.0 * sh * sh);
  double Qn = Q;
  for (int n = 1; n < kMaxTerms; ++n, Qn *= Q) {
    const double d = 1.0 - Qn;
    sum += -2.0 * Qn / (d * d) + 2.0 * n * Qn / d * std::cosh(static_cast<double>(n) * phi / t);
    if (Qn * std::exp(n * std::abs(re) / t) < kNegligible) break;
  }
  return sum / (t * t);
}

double eta1(const Nome& nm) { return pi * special_values(nm).P / 12.0; }

cplx weierstrass_zeta(cplx phi, const Nome& nm) {
  const double p = nm.p();
  cplx sum = eta1(nm) * phi / pi + 0.5 / std::tan(phi / 2.0);
  if (nm.is_disk()) return sum;
  const double grow = std::exp(std::abs(phi.imag()));
  require(p * grow < 1.0, Errc::OutOfRange, "zeta series outside its strip");
  double pn = p;
  for (int n = 1; n < kMaxTerms; ++n, pn *= p) {
    sum += 2.0 * pn / (1.0 - pn) * std::sin(static_cast<double>(n) * phi);
    if (pn * std::pow(grow, n) < kNegligible) return sum;
  }
  throw Error(Errc::NonConvergent, "zeta series did not converge");
}

double wp_inverse(double x, const Nome& nm) {
  const SpecialValues sv = special_values(nm);
  const double slack = 1e-14 * (std::abs(sv.e1) + std::abs(sv.e2));
  require(x >= sv.e2 - slack && x <= sv.e1 + slack, Errc::OutOfBranch, "wp_inverse needs e2 <= x <= e1");
  x = std::clamp(x, sv.e2, sv.e1);
  if (x == sv.e1) return 0.0;
  return wp_inverse_fraction((x - sv.e2) / (sv.e1 - sv.e2), nm);
}

double wp_inverse_fraction(double v, const Nome& nm) {
  require(v >= 0.0 && v <= 1.0, Errc::OutOfBranch, "wp_inverse needs e2 <= x <= e1");
  const HalfPeriodGaps g = half_period_gaps(nm);
  using boost::math::quadrature::gauss_kronrod;
  // s = e2 + d12 (1 - w^2) near e1 and s = e2 + d12 u^2 near e2
  auto upper = [&](double w) { return 1.0 / std::sqrt((1.0 - w * w) * (g.d13() - g.d12 * w * w)); };
  auto lower = [&](double u) { return 1.0 / std::sqrt((1.0 - u * u) * (g.d23 + g.d12 * u * u)); };
  const double half = std::sqrt(0.5);
  double y = gauss_kronrod<double, 31>::integrate(upper, 0.0, std::sqrt(1.0 - std::max(v, 0.5)), 20, 1e-14);
  if (v < 0.5) y += gauss_kronrod<double, 31>::integrate(lower, std::sqrt(v), half, 20, 1e-14);
  return y;
}

cplx rho1(cplx z, const Nome& nm) {
  if (nm.is_disk()) return (1.0 + z) / (2.0 * (1.0 - z));
  return 0.5 - log_theta_deriv(1, z, nm.p());
}

cplx rho1_series(cplx z, const Nome& nm) {
  const double p = nm.p();
  const double r = std::abs(z);
  require(r < 1.0 && (r > p || (nm.is_disk() && r >= 0.0)), Errc::OutOfAnnulus,
          "rho1 series needs q^2 < |z| < 1");
  cplx sum = 0.5;
  cplx zn = z;
  double pn = p;
  cplx wn = nm.is_disk() ? cplx(0.0) : p / z;
  const cplx w = wn;
  for (int n = 1; n < kMaxTerms; ++n) {
    sum += zn / (1.0 - pn);
    if (!nm.is_disk()) sum -= wn / (1.0 - pn);
    if (std::abs(zn) < 1e-18 && std::abs(wn) < 1e-18) return sum;
    zn *= z;
    wn *= w;
    pn *= p;
  }
  throw Error(Errc::NonConvergent, "rho1 series did not converge");
}

cplx conformal_H(cplx z, const Nome& nm) {
  const double r = std::abs(z);
  require(r >= nm.q() * (1.0 - 1e-12) && r <= 1.0 + 1e-12, Errc::OutOfAnnulus, "H_q needs q <= |z| <= 1");
  return 2.0 * I * rho1(z, nm);
}

cplx conformal_H_zeta(cplx z, const Nome& nm) {
  const cplx phi = angle_of(z);
  return -2.0 * (weierstrass_zeta(phi, nm) + I * eta1(nm) * std::log(z) / pi);
}

}  // namespace agaf
