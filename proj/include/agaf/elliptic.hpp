#pragma once

#include "agaf/common.hpp"
#include "agaf/theta.hpp"

namespace agaf {

// Lattice with half-periods omega1 = pi, omega3 = pi tau_q, tau_q = i|tau_q|.
struct SpecialValues {
  double e1, e2, e3;
  double g2, g3;
  double P;  // 1 - 24 sum q^{2n}/(1-q^{2n})^2
};

SpecialValues special_values(const Nome& nm);

// e1 - e2 = theta_4^4 / 4 and e2 - e3 = theta_2^4 / 4 from products, so they keep
// full relative precision where the differences of special_values cancel.
struct HalfPeriodGaps {
  double d12, d23;
  double d13() const noexcept { return d12 + d23; }
};
HalfPeriodGaps half_period_gaps(const Nome& nm);

// Angle coordinate phi_z = -i log z (principal branch).
inline cplx angle_of(cplx z) { return cplx(0.0, -1.0) * std::log(z); }

cplx wp(cplx phi, const Nome& nm);
inline cplx wp_at(cplx z, const Nome& nm) { return wp(angle_of(z), nm); }

struct WpDerivs {
  cplx d1;  // wp'
  cplx d2;  // wp''
};
WpDerivs wp_derivs(cplx phi, const Nome& nm);

// Same function through the imaginary transformation; diagnostic only.
cplx wp_imaginary(cplx phi, const Nome& nm);

// eta1 = zeta(pi) = pi P / 12
double eta1(const Nome& nm);
// Weierstrass zeta, diagnostic only.
cplx weierstrass_zeta(cplx phi, const Nome& nm);

// y >= 0 with wp(pi + i y) = x, for e2 <= x <= e1.
double wp_inverse(double x, const Nome& nm);
// Same, with x = e2 + v (e1 - e2); stays accurate when e1 - e2 is below double resolution.
double wp_inverse_fraction(double v, const Nome& nm);

// Ramanujan rho_1 through a_1; valid off the zeros of theta.
cplx rho1(cplx z, const Nome& nm);
// Bilateral series, q^2 < |z| < 1 only.
cplx rho1_series(cplx z, const Nome& nm);

// Conformal map of the annulus, 2i rho_1(z).
cplx conformal_H(cplx z, const Nome& nm);
// -2 (zeta(phi_z) + i eta1 log(z) / pi); diagnostic only.
cplx conformal_H_zeta(cplx z, const Nome& nm);

}  // namespace agaf
