#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "agaf/gaf.hpp"
#include "agaf/kernels.hpp"
#include "oracles.hpp"

using namespace agaf;

namespace {

// mean of f over replicas, compared with `target` in units of its standard error
template <class F>
double z_score(int n, double target, F&& f) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = f(k);
  const oracle::Moments m = oracle::moments(xs);
  return (m.mean - target) / m.se;
}

int zeros_in_ring(const std::vector<cplx>& zs, double lo, double hi) {
  return static_cast<int>(std::count_if(zs.begin(), zs.end(), [&](cplx z) { return std::abs(z) > lo && std::abs(z) < hi; }));
}

}  // namespace

TEST_CASE("margins and mode counts") {
  CHECK(default_margin(0.3) == doctest::Approx(0.14));
  const int n = default_modes(0.3, 0.14);
  CHECK(n == static_cast<int>(std::ceil(std::log(1e-12) / std::log(0.86))));
  CHECK(default_modes(0.0, 0.01) == 600);
  CHECK_THROWS_AS((void)default_modes(0.3, 0.2), Error);
  CHECK(truncation_tail(0.3, 0.3, n, 0.14) < 1e-10);
  CHECK(truncation_tail(0.3, 0.3, 5, 0.14) > 1e-3);
}

TEST_CASE("sampling is seeded") {
  const LaurentSample a = sample_gaf_annulus(0.3, 0.3, 20, 5);
  const LaurentSample b = sample_gaf_annulus(0.3, 0.3, 20, 5);
  const LaurentSample c = sample_gaf_annulus(0.3, 0.3, 20, 5, 1);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.coeffs != c.coeffs);
  CHECK(a.coeffs.size() == 41);
  CHECK(a.min_mode == -20);
  CHECK(a.max_mode == 20);
  CHECK(sample_gaf2_annulus(0.3, 10, 9).coeffs == sample_gaf2_annulus(0.3, 10, 9).coeffs);
  CHECK(sample_gaf_disk(0.5, 10, 9).coeffs == sample_gaf_disk(0.5, 10, 9).coeffs);
}

TEST_CASE("coefficient variances") {
  const double q = 0.4, r = 0.7, p = q * q;
  const int n = 100000;
  std::vector<LaurentSample> ann, disk, white;
  for (int k = 0; k < n; ++k) {
    ann.push_back(sample_gaf_annulus(q, r, 3, 1, k));
    disk.push_back(sample_gaf_disk(0.5, 2, 2, k));
    white.push_back(sample_gaf_disk(0.0, 2, 3, k));
  }
  for (int mode : {-2, 0, 3}) {
    const double scale = 1.0 + r * std::pow(p, mode);
    CHECK(std::abs(z_score(n, 1.0, [&](int k) { return std::norm(ann[k].coeff(mode)) * scale; })) < 3.0);
    CHECK(std::abs(z_score(n, 0.5, [&](int k) { return std::pow(ann[k].coeff(mode).real(), 2) * scale; })) < 3.0);
    CHECK(std::abs(z_score(n, 0.5, [&](int k) { return std::pow(ann[k].coeff(mode).imag(), 2) * scale; })) < 3.0);
  }
  CHECK(std::abs(z_score(n, 1.0 / 1.5, [&](int k) { return std::norm(disk[k].coeff(0)); })) < 3.0);
  // r = 0: every mode has unit variance
  for (int mode : {0, 2}) CHECK(std::abs(z_score(n, 1.0, [&](int k) { return std::norm(white[k].coeff(mode)); })) < 3.0);
}

TEST_CASE("empirical covariance matches the kernels") {
  const int n = 20000;
  const double q = 0.3, r = 0.3;
  const Nome nm(q);
  const int modes = default_modes(q, default_margin(q));
  const std::pair<cplx, cplx> pairs[] = {{cplx(0.5, 0.0), cplx(0.0, 0.6)}, {cplx(0.7, 0.1), cplx(-0.45, 0.3)}};
  std::vector<LaurentSample> samples;
  for (int k = 0; k < n; ++k) samples.push_back(sample_gaf_annulus(q, r, modes, 11, k));
  for (const auto& [z, w] : pairs) {
    const cplx s = szego_annulus(z, w, r, nm);
    CHECK(std::abs(z_score(n, s.real(), [&](int k) { return (samples[k](z) * std::conj(samples[k](w))).real(); })) < 3.0);
    CHECK(std::abs(z_score(n, s.imag(), [&](int k) { return (samples[k](z) * std::conj(samples[k](w))).imag(); })) < 3.0);
  }

  // disk
  const cplx z(0.3, 0.2), w(-0.4, 0.5);
  const cplx sd = szego_disk(z, w, 0.5);
  std::vector<LaurentSample> disk;
  for (int k = 0; k < n; ++k) disk.push_back(sample_gaf_disk(0.5, 150, 12, k));
  CHECK(std::abs(z_score(n, sd.real(), [&](int k) { return (disk[k](z) * std::conj(disk[k](w))).real(); })) < 3.0);
  CHECK(std::abs(z_score(n, sd.imag(), [&](int k) { return (disk[k](z) * std::conj(disk[k](w))).imag(); })) < 3.0);
}

TEST_CASE("second GAF has covariance S^2") {
  const int n = 20000;
  const double q = 0.3;
  const Nome nm(q);
  const cplx z(0.6, 0.1), w(0.5, -0.3);
  const cplx target = bergman(z, w, nm, Domain::annulus) + sk_constant(nm) / (z * std::conj(w));
  const cplx s = szego_annulus(z, w, q, nm);
  CHECK(oracle::rel(target, s * s) < 1e-10);
  std::vector<LaurentSample> samples;
  for (int k = 0; k < n; ++k) samples.push_back(sample_gaf2_annulus(q, 150, 13, k));
  CHECK(std::abs(z_score(n, target.real(), [&](int k) { return (samples[k](z) * std::conj(samples[k](w))).real(); })) < 3.0);
  CHECK(std::abs(z_score(n, target.imag(), [&](int k) { return (samples[k](z) * std::conj(samples[k](w))).imag(); })) < 3.0);
}

TEST_CASE("second GAF coefficients in the disk limit") {
  // the same seed draws the same Gaussians, so the ratio isolates c_n
  const double q = 1e-6, r = 1.0;
  const LaurentSample x2 = sample_gaf2_annulus(q, 6, 21);
  const LaurentSample x1 = sample_gaf_annulus(q, r, 6, 21);
  for (int n = 0; n <= 6; ++n) {
    const double c = std::abs(x2.coeff(n) / x1.coeff(n)) / std::sqrt(1.0 + r * std::pow(q * q, n));
    CHECK(std::abs(c - std::sqrt(n + 1.0)) < 1e-9);
  }
}

TEST_CASE("polynomial roots") {
  const std::vector<cplx> cubic{-6.0, 11.0, -6.0, 1.0};
  for (RootSolver s : {RootSolver::companion, RootSolver::aberth, RootSolver::automatic}) {
    auto roots = polynomial_roots(cubic, s);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    REQUIRE(roots.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(roots[k] - (k + 1.0)) < 1e-12);
  }
  // leading zeros are roots at the origin, trailing zeros lower the degree
  const std::vector<cplx> padded{0.0, 0.0, -0.5, 1.0, 0.0};
  auto roots = polynomial_roots(padded);
  CHECK(roots.size() == 3);
  CHECK(std::count(roots.begin(), roots.end(), cplx(0.0)) == 2);

  oracle::Rng rng(51);
  std::vector<cplx> a(41);
  for (auto& c : a) c = rng.gaussian();
  for (RootSolver s : {RootSolver::companion, RootSolver::aberth}) {
    const auto rs = polynomial_roots(a, s);
    CHECK(rs.size() == 40);
    for (cplx z : rs) {
      cplx v = 0.0;
      double scale = 0.0;
      for (std::size_t k = a.size(); k-- > 0;) {
        v = v * z + a[k];
        scale = scale * std::abs(z) + std::abs(a[k]);
      }
      CHECK(std::abs(v) < 1e-12 * scale);
    }
  }
}

TEST_CASE("zeros of deterministic series") {
  const ZeroSet one = find_zeros(deterministic_sample({-0.5, 1.0}, 0, 0.3), 0.1);
  REQUIRE(one.zeros.size() == 1);
  CHECK(std::abs(one.zeros[0] - 0.5) < 1e-14);
  CHECK(one.inner == doctest::Approx(0.4));
  CHECK(one.outer == doctest::Approx(0.9));

  // Laurent modes of z -> S(z, alpha; q), whose only zero in the annulus is -q / conj(alpha)
  const double q = 0.3;
  const cplx alpha(0.6, 0.1);
  const int m = 80;
  std::vector<cplx> c;
  for (int n = -m; n <= m; ++n) c.push_back(std::pow(std::conj(alpha), n) / (1.0 + q * std::pow(q, 2.0 * n)));
  const ZeroSet zs = find_zeros(deterministic_sample(c, -m, q), 0.05);
  REQUIRE(zs.zeros.size() == 1);
  CHECK(std::abs(zs.zeros[0] + q / std::conj(alpha)) < 1e-9);
  CHECK(zs.residual_max < 1e-8);
}

TEST_CASE("zero counts agree with the argument principle") {
  const double q = 0.3, r = 0.3;
  const double delta = default_margin(q);
  const int modes = default_modes(q, delta);
  const double mid = (q + 1.0) / 2.0;
  const double lo = mid * (1.0 - delta), hi = mid * (1.0 + delta);
  for (int k = 0; k < 20; ++k) {
    const LaurentSample s = sample_gaf_annulus(q, r, modes, 31, k);
    const ZeroSet zs = find_zeros(s, delta);
    CHECK(zs.residual_max < 1e-8);
    for (cplx z : zs.zeros) {
      CHECK(std::abs(z) > zs.inner);
      CHECK(std::abs(z) < zs.outer);
    }
    const auto f = [&](cplx z) { return s(z); };
    CHECK(oracle::winding(f, hi) - oracle::winding(f, lo) == zeros_in_ring(zs.zeros, lo, hi));
  }
}

TEST_CASE("truncation checks") {
  CHECK_THROWS_AS((void)find_zeros(sample_gaf_annulus(0.3, 0.3, 5, 1), 0.14), Error);
  try {
    (void)find_zeros(sample_gaf_annulus(0.3, 0.3, 5, 1), 0.14);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TruncationInsufficient);
  }
  CHECK_THROWS_AS((void)find_zeros(sample_gaf_annulus(0.3, 0.3, 50, 1), 0.3), Error);

  // dropping the last 16 modes of a longer draw leaves the counts in the margin annulus alone
  const double q = 0.3, delta = default_margin(q);
  const int modes = default_modes(q, delta);
  int changed = 0;
  for (int k = 0; k < 100; ++k) {
    const LaurentSample full = sample_gaf_annulus(q, 0.3, modes + 16, 41, k);
    LaurentSample cut = full;
    cut.min_mode = -modes;
    cut.max_mode = modes;
    cut.coeffs.assign(full.coeffs.begin() + 16, full.coeffs.end() - 16);
    if (find_zeros(full, delta).zeros.size() != find_zeros(cut, delta).zeros.size()) ++changed;
  }
  CHECK(changed <= 1);
}

TEST_CASE("X(alpha) and X(alpha hat) are uncorrelated at r = q") {
  const double q = 0.3;
  const Nome nm(q);
  const cplx alpha(0.6, 0.2), partner = alpha_hat(alpha, nm);
  const int n = 20000, modes = default_modes(q, default_margin(q));
  cplx cross = 0.0;
  double va = 0.0, vb = 0.0;
  for (int k = 0; k < n; ++k) {
    const LaurentSample s = sample_gaf_annulus(q, q, modes, 61, k);
    const cplx a = s(alpha), b = s(partner);
    cross += a * std::conj(b);
    va += std::norm(a);
    vb += std::norm(b);
  }
  CHECK(std::abs(cross) / std::sqrt(va * vb) < 4.0 / std::sqrt(n));
}

TEST_CASE("Monte Carlo plumbing") {
  McConfig cfg;
  cfg.n_samples = 100;
  cfg.exec = Exec::serial;
  const auto serial = mc_density(cfg, 4);
  cfg.exec = Exec::parallel;
  const auto parallel = mc_density(cfg, 4);
  REQUIRE(serial.size() == 4);
  for (std::size_t b = 0; b < 4; ++b) {
    CHECK(serial[b].estimate.value == parallel[b].estimate.value);
    CHECK(serial[b].estimate.std_error == parallel[b].estimate.std_error);
    CHECK(serial[b].estimate.n_samples == 100);
    CHECK(serial[b].analytic > 0.0);
  }
  CHECK(serial.front().lo == doctest::Approx(0.3 + 0.14));
  CHECK(serial.back().hi == doctest::Approx(1.0 - 0.14));

  cfg.n_samples = 50;
  try {
    (void)mc_density(cfg, 4);
    FAIL("expected InsufficientStatistics");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientStatistics);
  }
  cfg.n_samples = 100;
  CHECK_THROWS_AS((void)mc_pair_statistic(cfg, PairGeometry{0.6, 0.01, 7}), Error);
  CHECK_THROWS_AS((void)mc_pair_statistic(cfg, PairGeometry{0.95, 0.01, 8}), Error);
}

TEST_CASE("conditioned field vanishes at the anchors") {
  McConfig cfg;
  cfg.q = 0.3;
  cfg.r = 0.5;
  cfg.n_samples = 2000;
  const std::vector<cplx> anchors{cplx(0.6, 0.2)};
  const std::vector<cplx> probes{cplx(0.5, -0.3), cplx(-0.7, 0.1)};
  const CovarianceCheck c = conditional_covariance_check(cfg, anchors, probes);
  CHECK(c.anchors_vanish);
  CHECK(c.n_samples == 2000);
  CHECK(c.max_residual < 4.0);
  const std::vector<cplx> outside{cplx(0.95, 0.0)};
  CHECK_THROWS_AS((void)conditional_covariance_check(cfg, outside, probes), Error);
}
