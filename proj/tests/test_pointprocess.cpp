#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "agaf/elliptic.hpp"
#include "agaf/kernels.hpp"
#include "agaf/pointprocess.hpp"
#include "agaf/theta.hpp"
#include "oracles.hpp"

using namespace agaf;
using oracle::rel;

namespace {

// independent of density_annulus: written straight from the theta form
double density_ref(double a, double r, double q) {
  const double p = q * q;
  const double q0 = oracle::euler(p);
  const double a2 = a * a;
  const double num = std::pow(q0, 4) * (oracle::theta_series(-r, p) * oracle::theta_series(-r * a2 * a2, p)).real();
  const double den = (oracle::theta_series(-r * a2, p) * oracle::theta_series(a2, p)).real();
  return num / (den * den);
}

}  // namespace

TEST_CASE("permanent, determinant, perdet") {
  const CMatrix id = CMatrix::Identity(3, 3);
  CHECK(std::abs(per(id) - 1.0) < 1e-15);
  CHECK(std::abs(det(id) - 1.0) < 1e-15);
  CHECK(std::abs(perdet(id) - 1.0) < 1e-15);

  oracle::Rng rng(41);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix m = rng.matrix(n);
    const cplx p = oracle::permanent(m), d = oracle::determinant(m);
    CHECK(rel(per(m), p) < 1e-12);
    CHECK(rel(per_naive(m), p) < 1e-12);
    CHECK(rel(per_ryser(m), p) < 1e-12);
    CHECK(rel(det(m), d) < 1e-12);
    CHECK(rel(perdet(m), p * d) < 1e-12);
  }
  // Ryser range
  const CMatrix big = rng.matrix(10);
  CHECK(rel(per(big), per_naive(big)) < 1e-10);

  const CMatrix m2 = rng.matrix(2);
  CHECK(rel(perdet(m2), det(m2.cwiseProduct(m2))) < 1e-13);

  for (int t = 0; t < 10; ++t) {
    const CMatrix a = rng.matrix(4);
    const CMatrix h = a * a.adjoint();
    const double pr = per(h).real(), dt = det(h).real();
    CHECK(pr >= dt);
    CHECK(dt >= 0.0);
    CHECK(perdet(h).real() >= 0.0);
  }
  CHECK_THROWS_AS((void)per(CMatrix(2, 3)), Error);
  CHECK_THROWS_AS((void)per(rng.matrix(13)), Error);
}

TEST_CASE("hyperdeterminant") {
  Tensor3 one(1);
  one(0, 0, 0) = cplx(2.0, -1.0) * 3.0;
  CHECK(std::abs(hyperdet23(one) - cplx(6.0, -3.0)) < 1e-15);

  oracle::Rng rng(42);
  for (int n = 2; n <= 4; ++n) {
    Tensor3 c(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) c(i, j, k) = rng.gaussian();
    CHECK(rel(hyperdet23(c), oracle::hyperdet23(n, [&](int i, int j, int k) { return c(i, j, k); })) < 1e-12);
  }
  const int n = 3;
  const CMatrix a = rng.matrix(n), b = rng.matrix(n);
  Tensor3 c(n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) c(i1, i2, i3) = a(i2, i1) * b(i2, i3);
  CHECK(rel(hyperdet23(c), oracle::permanent(a) * oracle::determinant(b)) < 1e-12);
  CHECK_THROWS_AS((void)hyperdet23(Tensor3(6)), Error);
}

TEST_CASE("annulus correlation functions") {
  oracle::Rng rng(43);
  for (double q : {0.2, 0.5}) {
    const Nome nm(q);
    for (double r : {0.3, 1.7}) {
      for (int i = 0; i < 10; ++i) {
        const cplx z = rng.in_annulus(q * 1.02, 0.98);
        const std::vector<cplx> one{z};
        const double ref = density_ref(std::abs(z), r, q);
        CHECK(std::abs(rho_n_annulus(one, r, nm) - ref) < 1e-12 * ref);
        CHECK(std::abs(density_annulus(std::abs(z), r, nm) - ref) < 1e-12 * ref);
      }
      const cplx z = rng.in_annulus(q * 1.1, 0.9);
      const std::vector<cplx> same{z, z};
      CHECK(rho_n_annulus(same, r, nm) == 0.0);

      // (q, r)-inversion for a pair
      const std::vector<cplx> pair{rng.in_annulus(q * 1.1, 0.9), rng.in_annulus(q * 1.1, 0.9)};
      const std::vector<cplx> image{q / pair[0], q / pair[1]};
      double jac = 1.0;
      for (cplx w : pair) jac *= q * q / std::pow(std::abs(w), 4);
      const double lhs = rho_n_annulus(image, r, nm) * jac;
      CHECK(std::abs(lhs - rho_n_annulus(pair, nm.p() / r, nm)) < 1e-10 * lhs);

      // hyperdeterminant form
      for (int n = 1; n <= 4; ++n) {
        std::vector<cplx> pts;
        for (int k = 0; k < n; ++k) pts.push_back(rng.in_annulus(q * 1.1, 0.9));
        const double a = rho_n_annulus(pts, r, nm);
        CHECK(a >= 0.0);
        CHECK(std::abs(rho_n_annulus_hyperdet(pts, r, nm) - a) < 1e-10 * a);
      }
    }
  }
  CHECK_THROWS_AS((void)rho_n_annulus(std::vector<cplx>{1.2}, 0.5, Nome(0.3)), Error);
}

TEST_CASE("rotation invariance and edge behaviour of the density") {
  const Nome nm(0.3);
  const double r = 0.6;
  const double base = rho_n_annulus(std::vector<cplx>{0.55}, r, nm);
  for (int k = 1; k < 16; ++k) {
    const std::vector<cplx> z{std::polar(0.55, 2 * std::numbers::pi * k / 16)};
    CHECK(std::abs(rho_n_annulus(z, r, nm) - base) < 1e-12 * base);
  }
  const double a = 1.0 - 1e-4;
  CHECK(std::abs(density_annulus(a, r, nm) * std::pow(1 - a * a, 2) - 1.0) < 0.01);
  const double b = 0.3 + 1e-4;
  CHECK(std::abs(density_annulus(b, r, nm) * std::pow(b * b - 0.09, 2) / 0.09 - 1.0) < 0.01);
}

TEST_CASE("disk correlation functions") {
  CHECK(std::abs(rho_n_disk(std::vector<cplx>{0.0}, 0.7) - 1.7) < 1e-14);
  CHECK(std::abs(density_disk(0.0, 0.7) - 1.7) < 1e-14);
  oracle::Rng rng(44);
  std::vector<cplx> pts;
  for (int k = 0; k < 4; ++k) pts.push_back(rng.in_annulus(0.1, 0.9));
  CMatrix k(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k(i, j) = 1.0 / std::pow(1.0 - pts[i] * std::conj(pts[j]), 2);
  const double dk = oracle::determinant(k).real();
  CHECK(std::abs(rho_n_disk(pts, 0.0) - dk) < 1e-10 * dk);
  // the large-r correction is of order 1/(r prod|z|^4), so keep the points outward
  std::vector<cplx> outer;
  for (int j = 0; j < 4; ++j) outer.push_back(rng.in_annulus(0.8, 0.95));
  CMatrix ko(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ko(i, j) = 1.0 / std::pow(1.0 - outer[i] * std::conj(outer[j]), 2);
  const double dko = oracle::determinant(ko).real();
  CHECK(std::abs(rho_n_disk(outer, 1e6) - dko) < 1e-4 * dko);
  CHECK_THROWS_AS((void)rho_n_disk(std::vector<cplx>{1.1}, 0.5), Error);
}

TEST_CASE("unfolded two-point function") {
  const Nome nm(0.3);
  const double r = 0.5;
  const cplx w(0.2, 0.5);
  CHECK(std::abs(unfolded_g(std::polar(1.0 - 1e-8, 0.7), w, r, nm, Domain::annulus) - 1.0) < 1e-5);

  const double s = std::pow(4.0, -0.25);
  CHECK(std::abs(unfolded_g(-s, s, 4.0, Nome(0.0), Domain::disk) - (6 + 4 + 0.25) / (4 * (2 + 0.5))) < 1e-12);
  CHECK(std::abs(g_tilde_disk(4.0) - 10.25 / 10) < 1e-15);

  oracle::Rng rng(45);
  for (int i = 0; i < 200; ++i) {
    const cplx z = rng.in_annulus(0.32, 0.98), v = rng.in_annulus(0.32, 0.98);
    const double a = std::abs(z), b = std::abs(v);
    const double g = unfolded_g(z, v, r, nm, Domain::annulus);
    CHECK(g_extremes(a, b, r, nm, +1) <= g + 1e-12);
    CHECK(g <= g_extremes(a, b, r, nm, -1) + 1e-12);
    // ratio of correlation functions
    const std::vector<cplx> both{z, v};
    const double ratio = rho_n_annulus(both, r, nm) /
                         (density_annulus(a, r, nm) * density_annulus(b, r, nm));
    CHECK(std::abs(ratio - g) < 1e-10 * std::max(1.0, g));
    // symmetry under z -> q/z, r -> q^2/r
    CHECK(std::abs(unfolded_g(0.3 / z, 0.3 / v, nm.p() / r, nm, Domain::annulus) - g) < 1e-10);
  }
  for (double a : {0.4, 0.7}) {
    for (double b : {0.5, 0.9}) {
      CHECK(std::abs(g_extremes(a, b, r, nm, +1) - unfolded_g(a, b, r, nm, Domain::annulus)) < 1e-12);
      CHECK(std::abs(g_extremes(a, b, r, nm, -1) - unfolded_g(-a, b, r, nm, Domain::annulus)) < 1e-12);
      CHECK(std::abs(g_disk_upper_closed(a, b, r) - unfolded_g(-a, b, r, Nome(0.0), Domain::disk)) < 1e-12);
    }
  }
}

TEST_CASE("G functions") {
  const Nome nm(0.2);
  for (double r : {0.3, 1.0, 2.0}) {
    CHECK(std::abs(G_tilde(1.0, r, nm) - 1.0) < 1e-13);
    for (double x : {0.3, 0.6, 0.9}) CHECK(std::abs(G_vee(x, r, nm) - G_tilde(x * x, r, nm)) < 1e-12);
    for (double x : {0.5, 0.7, 0.95}) CHECK(std::abs(G_wedge(x, r, nm) - G_wedge_closed(x, r, nm)) < 1e-11);
  }
  CHECK(std::abs(G_vee(std::sqrt(0.2), 1.0, nm) - G_vee_sqrtq_r1(nm)) < 1e-10);
  CHECK_THROWS_AS((void)G_wedge(0.4, 0.5, nm), Error);
  CHECK_THROWS_AS((void)G_tilde(0.01, 0.5, nm), Error);
}

TEST_CASE("sign of G_vee near both ends follows kappa") {
  const double q = 0.1;
  const Nome nm(q);
  const double rc = r0(q).r0;
  for (double r : {rc + 0.1, 0.8}) {
    CHECK(kappa(r, nm) > 0.0);
    CHECK(G_vee(q + 1e-3, r, nm) > 1.0);
    CHECK(G_vee(1.0 - 1e-3, r, nm) > 1.0);
  }
}

TEST_CASE("critical curve") {
  const CriticalCurvePoint c = r0(0.1);
  CHECK(std::abs(c.r0 - 0.348) < 1e-3);
  CHECK(c.kappa_at.has_value());
  CHECK(std::abs(*c.kappa_at) < 1e-12);
  for (double q : {0.05, 0.3, 0.6, 0.9, 0.95}) {
    const double v = r0(q).r0;
    CHECK(q < v);
    CHECK(v < 1.0);
  }
  CHECK(std::abs(r0(0.9).r0 / 0.95 - 1.0) < 0.02);
  // gaps from theta constants agree with the plain differences where those are resolved
  for (double q : {0.1, 0.4}) {
    const Nome nm(q);
    const SpecialValues v = special_values(nm);
    const HalfPeriodGaps g = half_period_gaps(nm);
    CHECK(std::abs(g.d12 - (v.e1 - v.e2)) < 1e-13);
    CHECK(std::abs(g.d23 - (v.e2 - v.e3)) < 1e-13);
    const double w = v.e2 + 0.3 * (v.e1 - v.e2);
    CHECK(std::abs(wp_inverse(w, nm) - wp_inverse_fraction(0.3, nm)) < 1e-13);
  }
  CHECK(std::abs(r_critical() - 0.2846303639) < 1e-10);
  CHECK(std::abs(kappa0(r_critical())) < 1e-14);
  CHECK_THROWS_AS((void)r0(0.97), Error);
}

TEST_CASE("repulsive phase scan") {
  const PhaseScan s = repulsive_phase_check(0.1, 200);
  CHECK(s.max_g <= 1.0 + 1e-12);
  const PhaseScan serial = repulsive_phase_check(0.1, 200, Exec::serial);
  CHECK(serial.max_g == s.max_g);
  CHECK(serial.min_d_tilde == s.min_d_tilde);
  CHECK(g_tilde_disk(2.0) > 1.0);
  CHECK(std::abs(g_tilde_disk(2.0) - 8.5 / (4 * (std::sqrt(2.0) + 1 / std::sqrt(2.0)))) < 1e-15);
  for (double t : {0.2, 0.5, 0.8}) {
    CHECK(std::abs(g_disk_upper_closed(t, 1.0 - 1e-12, 0.1) - 1.0) < 1e-9);
    CHECK(std::abs(g_disk_upper_closed(1.0 - 1e-12, t, 0.1) - 1.0) < 1e-9);
  }
  CHECK(repulsive_phase_check(2.0, 100).max_g > 1.0);
}

TEST_CASE("Frobenius determinant") {
  const Nome nm(0.3);
  CHECK(frobenius_residual(std::vector<cplx>{cplx(0.5, 0.2)}, 0.7, nm) < 1e-13);
  oracle::Rng rng(46);
  for (int i = 0; i < 10; ++i) {
    std::vector<cplx> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(rng.in_annulus(0.35, 0.95));
    CHECK(frobenius_residual(pts, rng.uniform(0.1, 2.0), nm) < 1e-10);
  }
  const cplx z(0.6, 0.1);
  CHECK(frobenius_residual(std::vector<cplx>{z, z + 1e-4}, 0.7, nm) < 1e-6);
}
