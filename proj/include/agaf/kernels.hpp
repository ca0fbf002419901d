#pragma once

#include <functional>
#include <span>
#include <vector>

#include "agaf/common.hpp"
#include "agaf/theta.hpp"

namespace agaf {

// Jordan-Kronecker function f(z, a) = q0^2 theta(za) / (theta(z) theta(a)).
cplx jk(cplx z, cplx a, const Nome& nm);
// Bilateral series sum_n z^n / (1 - a q^{2n}); needs q^2 < |z| < 1.
// modes = 0 sums until the tails are negligible, otherwise n in [-modes, modes].
cplx jk_series(cplx z, cplx a, const Nome& nm, int modes = 0);
// Rapidly convergent form symmetric in (z, a), built on q^{2n^2}.
cplx jk_symmetric_series(cplx z, cplx a, const Nome& nm);

struct KernelQuery {
  cplx z, w;
  double r;
};

// Weighted Szego kernel of the annulus, theta form.
cplx szego_annulus(cplx z, cplx w, double r, const Nome& nm);
inline cplx szego_annulus(const KernelQuery& k, const Nome& nm) { return szego_annulus(k.z, k.w, k.r, nm); }
// The same kernel as a function of x = z conj(w), with a complex weight.
cplx szego_weighted(cplx x, cplx r, const Nome& nm);
cplx szego_annulus_series(cplx z, cplx w, double r, const Nome& nm, int modes = 0);

cplx szego_disk(cplx z, cplx w);
cplx szego_disk(cplx z, cplx w, double r);

// disk: 1/(1 - z conj w)^2; annulus: Laurent series.
cplx bergman(cplx z, cplx w, const Nome& nm, Domain domain);
// Annulus Bergman kernel through wp; cross-check for the series.
cplx bergman_annulus_wp(cplx z, cplx w, const Nome& nm);

// a(q) = e2 + P/12 + 1/(2 log q)
double sk_constant(const Nome& nm);
// a(q) = -2 sum (-1)^n n q^n / (1 - q^{2n}) + 1/(2 log q)
double sk_constant_series(const Nome& nm);

// Slit map z theta(alpha/z) / theta(conj(alpha) z); Mobius map when q = 0.
cplx h_alpha(cplx z, cplx alpha, const Nome& nm);
// h'_alpha(alpha) = q0^2 / theta(|alpha|^2)
double h_alpha_slope(cplx alpha, const Nome& nm);
// -q / conj(alpha)
cplx alpha_hat(cplx alpha, const Nome& nm);
// Ahlfors map h_alpha(z) h_{alpha hat}(z) / z
cplx ahlfors(cplx z, cplx alpha, const Nome& nm);
cplx ahlfors_theta_form(cplx z, cplx alpha, const Nome& nm);

// Ordered zero anchors inside the annulus, pairwise at least 1e-8 apart.
class AnchorList {
 public:
  AnchorList(std::vector<cplx> alphas, const Nome& nm);
  std::span<const cplx> alphas() const noexcept { return alphas_; }
  std::size_t size() const noexcept { return alphas_.size(); }
  // r * prod |alpha|^2
  double effective_weight(double r) const noexcept;

 private:
  std::vector<cplx> alphas_;
};

using Kernel = std::function<cplx(cplx, cplx)>;

// Schur complement of `base` at the anchors, taken in order.
cplx conditional_kernel(const Kernel& base, std::span<const cplx> anchors, cplx z, cplx w);

// gamma(z) = prod_l h_{alpha_l}(z)
cplx anchor_gamma(cplx z, const AnchorList& anchors, const Nome& nm);
// S(z, w; r prod|alpha|^2) gamma(z) conj(gamma(w))
cplx mccullough_shen(cplx z, cplx w, double r, const AnchorList& anchors, const Nome& nm);

// Relative gap between a finite-difference d_z d_wbar log S(z, w; r) and
// theta(-r)/theta(-r (z wbar)^2) S(z, w; r z wbar)^2.
double log_deriv_identity_residual(cplx z, cplx w, double r, const Nome& nm);

}  // namespace agaf
