#include "agaf/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "agaf/elliptic.hpp"

namespace agaf {

namespace {

constexpr int kMaxTerms = 10'000'000;
constexpr double kTiny = 1e-18;

cplx guarded_theta(cplx x, const Nome& nm) {
  const cplx t = theta(x, nm);
  require(!is_theta_zero(t, x), Errc::PoleAtPowerOfQ, "argument at a power of q^2");
  return t;
}

bool in_open_annulus(cplx z, const Nome& nm) {
  const double r = std::abs(z);
  return r > nm.q() && r < 1.0;
}

}  // namespace

cplx jk(cplx z, cplx a, const Nome& nm) {
  if (nm.is_disk()) {
    require(z != 1.0 && a != 1.0, Errc::PoleAtPowerOfQ, "jk pole at 1");
    return (1.0 - z * a) / ((1.0 - z) * (1.0 - a));
  }
  const double q0 = nm.q0();
  return q0 * q0 * theta(z * a, nm) / (guarded_theta(z, nm) * guarded_theta(a, nm));
}

cplx jk_series(cplx z, cplx a, const Nome& nm, int modes) {
  const double p = nm.p();
  const double m = std::abs(z);
  require(m < 1.0 && m > p, Errc::OutOfAnnulus, "jk series needs q^2 < |z| < 1");
  const cplx w = p / z;
  cplx sum = 1.0 / (1.0 - a);
  cplx zn = z, wn = w;
  double pn = p;
  const int limit = modes > 0 ? modes : kMaxTerms;
  for (int n = 1; n <= limit; ++n) {
    const cplx pos = zn / (1.0 - a * pn);
    const cplx neg = wn / (pn - a);
    sum += pos + neg;
    if (modes == 0 && std::abs(zn) + std::abs(wn) < kTiny) return sum;
    zn *= z;
    wn *= w;
    pn *= p;
  }
  require(modes > 0, Errc::NonConvergent, "jk series did not converge");
  return sum;
}

cplx jk_symmetric_series(cplx z, cplx a, const Nome& nm) {
  const double p = nm.p();
  require(z != 1.0 && a != 1.0, Errc::PoleAtPowerOfQ, "jk pole at 1");
  cplx sum = (1.0 - z * a) / ((1.0 - z) * (1.0 - a));
  if (nm.is_disk()) return sum;
  const cplx za = z * a;
  const cplx zi = 1.0 / z, ai = 1.0 / a, zai = 1.0 / za;
  cplx pw = za, nw = zai;
  double pn = p;
  for (int n = 1; n < kMaxTerms; ++n) {
    const double gauss = std::pow(p, static_cast<double>(n) * n);
    const cplx zp = z * pn, ap = a * pn, zip = zi * pn, aip = ai * pn;
    const cplx pos = gauss * pw * (1.0 + zp / (1.0 - zp) + ap / (1.0 - ap));
    const cplx neg = gauss * nw * (1.0 + zip / (1.0 - zip) + aip / (1.0 - aip));
    sum += pos - neg;
    if (gauss * (std::abs(pw) + std::abs(nw)) < kTiny) return sum;
    pw *= za;
    nw *= zai;
    pn *= p;
  }
  throw Error(Errc::NonConvergent, "symmetric jk series did not converge");
}

cplx szego_weighted(cplx x, cplx r, const Nome& nm) { return jk(x, -r, nm); }

cplx szego_annulus(cplx z, cplx w, double r, const Nome& nm) {
  require(r > 0.0, Errc::OutOfRange, "weight r must be positive");
  return jk(z * std::conj(w), -r, nm);
}

cplx szego_annulus_series(cplx z, cplx w, double r, const Nome& nm, int modes) {
  require(r > 0.0, Errc::OutOfRange, "weight r must be positive");
  return jk_series(z * std::conj(w), -r, nm, modes);
}

cplx szego_disk(cplx z, cplx w) { return 1.0 / (1.0 - z * std::conj(w)); }

cplx szego_disk(cplx z, cplx w, double r) {
  const cplx x = z * std::conj(w);
  return (1.0 + r * x) / ((1.0 + r) * (1.0 - x));
}

cplx bergman(cplx z, cplx w, const Nome& nm, Domain domain) {
  const cplx x = z * std::conj(w);
  if (domain == Domain::disk) {
    require(std::abs(z) < 1.0 && std::abs(w) < 1.0, Errc::OutOfDomain, "Bergman kernel needs interior points");
    return 1.0 / ((1.0 - x) * (1.0 - x));
  }
  require(!nm.is_disk() && in_open_annulus(z, nm) && in_open_annulus(w, nm), Errc::OutOfDomain,
          "Bergman kernel needs annulus points");
  const double p = nm.p();
  const cplx y = p / x;
  cplx sum = 0.0, xn = x, yn = y;
  double pn = p;
  for (int n = 1; n < kMaxTerms; ++n) {
    sum += static_cast<double>(n) * (xn + yn) / (1.0 - pn);
    if (n * (std::abs(xn) + std::abs(yn)) < kTiny) break;
    xn *= x;
    yn *= y;
    pn *= p;
  }
  return (-0.5 / std::log(nm.q()) + sum) / x;
}

cplx bergman_annulus_wp(cplx z, cplx w, const Nome& nm) {
  require(!nm.is_disk(), Errc::OutOfDomain, "annulus form needs q > 0");
  const cplx x = z * std::conj(w);
  const double P = special_values(nm).P;
  return (-0.5 / std::log(nm.q()) - (wp_at(x, nm) + P / 12.0)) / x;
}

double sk_constant(const Nome& nm) {
  if (nm.is_disk()) return 0.0;
  const SpecialValues sv = special_values(nm);
  return sv.e2 + sv.P / 12.0 + 0.5 / std::log(nm.q());
}

double sk_constant_series(const Nome& nm) {
  if (nm.is_disk()) return 0.0;
  const double q = nm.q();
  double sum = 0.0, qn = q;
  for (int n = 1; n < kMaxTerms && qn > 1e-20; ++n, qn *= q) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    sum += sign * n * qn / (1.0 - qn * qn);
  }
  return -2.0 * sum + 0.5 / std::log(q);
}

cplx h_alpha(cplx z, cplx alpha, const Nome& nm) {
  if (z == alpha) return 0.0;
  if (nm.is_disk()) return (z - alpha) / (1.0 - std::conj(alpha) * z);
  return z * theta(alpha / z, nm) / guarded_theta(std::conj(alpha) * z, nm);
}

double h_alpha_slope(cplx alpha, const Nome& nm) {
  const double q0 = nm.q0();
  return q0 * q0 / theta(std::norm(alpha), nm).real();
}

cplx alpha_hat(cplx alpha, const Nome& nm) { return -nm.q() / std::conj(alpha); }

cplx ahlfors(cplx z, cplx alpha, const Nome& nm) {
  return h_alpha(z, alpha, nm) * h_alpha(z, alpha_hat(alpha, nm), nm) / z;
}

cplx ahlfors_theta_form(cplx z, cplx alpha, const Nome& nm) {
  const double q = nm.q();
  const cplx ab = std::conj(alpha);
  return z * theta({-q * z * ab, alpha / z}, nm) /
         (guarded_theta(-q * z / alpha, nm) * guarded_theta(ab * z, nm));
}

AnchorList::AnchorList(std::vector<cplx> alphas, const Nome& nm) : alphas_(std::move(alphas)) {
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    require(in_open_annulus(alphas_[i], nm) || (nm.is_disk() && std::abs(alphas_[i]) < 1.0),
            Errc::OutOfAnnulus, "anchor outside the annulus");
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(alphas_[i] - alphas_[j]) >= 1e-8, Errc::DegenerateAnchor, "anchors closer than 1e-8");
  }
}

double AnchorList::effective_weight(double r) const noexcept {
  double w = r;
  for (cplx a : alphas_) w *= std::norm(a);
  return w;
}

cplx conditional_kernel(const Kernel& base, std::span<const cplx> anchors, cplx z, cplx w) {
  const auto n = static_cast<Eigen::Index>(anchors.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      require(std::abs(anchors[i] - anchors[j]) >= 1e-8, Errc::DegenerateAnchor, "anchors closer than 1e-8");

  std::vector<cplx> pts(anchors.begin(), anchors.end());
  pts.push_back(z);
  pts.push_back(w);
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = base(pts[i], pts[j]);

  // k^{a1..aj} = k^{a1..a(j-1)} - k(., aj) k(aj, .) / k(aj, aj), in place
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx piv = g(j, j);
    require(piv.real() > 1e-12 * std::abs(base(pts[j], pts[j])), Errc::DegenerateAnchor,
            "conditional kernel pivot vanished");
    for (Eigen::Index a = j + 1; a < m; ++a)
      for (Eigen::Index b = j + 1; b < m; ++b) g(a, b) -= g(a, j) * g(j, b) / piv;
  }
  return g(m - 2, m - 1);
}

cplx anchor_gamma(cplx z, const AnchorList& anchors, const Nome& nm) {
  cplx g = 1.0;
  for (cplx a : anchors.alphas()) g *= h_alpha(z, a, nm);
  return g;
}

cplx mccullough_shen(cplx z, cplx w, double r, const AnchorList& anchors, const Nome& nm) {
  const double reff = anchors.effective_weight(r);
  const cplx s = nm.is_disk() ? szego_disk(z, w, reff) : szego_annulus(z, w, reff, nm);
  return s * anchor_gamma(z, anchors, nm) * std::conj(anchor_gamma(w, anchors, nm));
}

double log_deriv_identity_residual(cplx z, cplx w, double r, const Nome& nm) {
  const cplx u = z, v = std::conj(w);
  const cplx s0 = szego_weighted(u * v, r, nm);
  auto mixed = [&](double h) {
    auto f = [&](double du, double dv) { return std::log(szego_weighted((u + du) * (v + dv), r, nm) / s0); };
    return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
  };
  const double h = 1e-3;
  const cplx lhs = (4.0 * mixed(h / 2.0) - mixed(h)) / 3.0;
  const cplx x = u * v;
  const cplx s = szego_weighted(x, r * x, nm);
  const cplx rhs = theta(-r, nm) / theta(-r * x * x, nm) * s * s;
  return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace agaf
