#include "agaf/gaf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "agaf/kernels.hpp"
#include "agaf/pointprocess.hpp"
#include "agaf/theta.hpp"
#include "parallel.hpp"

namespace agaf {

namespace {

constexpr double kTailTol = 1e-10;
constexpr int kModeCap = 600;
constexpr int kNewtonSteps = 5;
constexpr double kResidualTol = 1e-8;

std::mt19937_64 replica_engine(std::uint64_t seed, std::uint64_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
  return std::mt19937_64(seq);
}

template <class Scale>
LaurentSample draw(int lo, int hi, double q, double r, std::uint64_t seed, std::uint64_t replica, Scale&& scale) {
  auto gen = replica_engine(seed, replica);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  LaurentSample s;
  s.min_mode = lo;
  s.max_mode = hi;
  s.q = q;
  s.r = r;
  s.seed = seed;
  s.coeffs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int n = lo; n <= hi; ++n) {
    const double re = normal(gen);
    const double im = normal(gen);
    s.coeffs.push_back(scale(n) * cplx(re, im));
  }
  return s;
}

// p(z), p'(z) and sum |a_k||z|^k by Horner; for |z| > 1 the reversed polynomial keeps it bounded.
struct HornerOut {
  cplx newton;  // p / p'
  double rel;   // |p| / sum |a_k| |z|^k
};

HornerOut horner(std::span<const cplx> a, cplx z) {
  const std::size_t n = a.size() - 1;
  cplx p = 0.0, dp = 0.0;
  double bound = 0.0;
  if (std::abs(z) <= 1.0) {
    const double az = std::abs(z);
    for (std::size_t k = n + 1; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + a[k];
      bound = bound * az + std::abs(a[k]);
    }
    return {p / dp, std::abs(p) / bound};
  }
  const cplx y = 1.0 / z;
  const double ay = std::abs(y);
  for (std::size_t k = 0; k <= n; ++k) {
    dp = dp * y + p;
    p = p * y + a[k];
    bound = bound * ay + std::abs(a[k]);
  }
  // p(z) = z^n p_rev(1/z)
  const cplx ratio = static_cast<double>(n) * y - y * y * dp / p;
  return {1.0 / ratio, std::abs(p) / bound};
}

// Parlett-Reinsch diagonal scaling; the coefficients span many decades.
void balance(Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0, row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(m(j, i));
        row += std::abs(m(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      const double s = col + row;
      while (col < row / 2.0) {
        col *= 2.0;
        row /= 2.0;
        f *= 2.0;
      }
      while (col >= row * 2.0) {
        col /= 2.0;
        row *= 2.0;
        f /= 2.0;
      }
      if (col + row < 0.95 * s) {
        changed = true;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

std::vector<cplx> companion_roots(std::span<const cplx> a) {
  const auto n = static_cast<Eigen::Index>(a.size() - 1);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) c(i, n - 1) = -a[static_cast<std::size_t>(i)] / a.back();
  balance(c);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(c, false);
  require(solver.info() == Eigen::Success, Errc::NonConvergent, "companion eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Starting radii from the upper convex hull of (k, log|a_k|).
std::vector<cplx> aberth_start(std::span<const cplx> a) {
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<int> hull;
  auto la = [&](int k) {
    const double m = std::abs(a[static_cast<std::size_t>(k)]);
    return m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
  };
  for (int k = 0; k <= n; ++k) {
    if (!std::isfinite(la(k))) continue;
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      // drop j if it lies on or below the chord i -> k
      if ((la(j) - la(i)) * (k - i) <= (la(k) - la(i)) * (j - i)) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  std::vector<cplx> z;
  z.reserve(static_cast<std::size_t>(n));
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int i = hull[h], j = hull[h + 1];
    const int m = j - i;
    const double u = std::exp((la(i) - la(j)) / m);
    for (int l = 0; l < m; ++l) {
      const double angle = 2.0 * std::numbers::pi * l / m + 2.0 * std::numbers::pi * h / n + 0.4;
      z.push_back(std::polar(u, angle));
    }
  }
  return z;
}

std::vector<cplx> aberth_roots(std::span<const cplx> a) {
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<cplx> z = aberth_start(a);
  require(static_cast<int>(z.size()) == n, Errc::NonConvergent, "zero coefficient at an end of the polynomial");
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  const double eps = std::numeric_limits<double>::epsilon();
  int remaining = n;
  for (int iter = 0; iter < 500 && remaining > 0; ++iter) {
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const HornerOut h = horner(a, z[i]);
      if (h.rel < 4.0 * n * eps) {
        done[i] = 1;
        --remaining;
        continue;
      }
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cplx w = h.newton / (1.0 - h.newton * sum);
      z[i] -= w;
      if (std::abs(w) < 4.0 * eps * std::abs(z[i])) {
        done[i] = 1;
        --remaining;
      }
    }
  }
  if (remaining != 0) throw Error(Errc::NonConvergent, "Aberth iteration left " + std::to_string(remaining) + " of " + std::to_string(n) + " roots");
  return z;
}

double density(double s, double r, double q) {
  return q == 0.0 ? density_disk(s, r) : density_annulus(s, r, Nome(q));
}

// integral of rho^1(s) 2 s ds over [lo, hi]
double radial_mass(double lo, double hi, double r, double q) {
  auto f = [&](double s) { return 2.0 * s * density(s, r, q); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-12);
}

struct Plan {
  double delta;
  int modes;
};

Plan plan_for(const McConfig& cfg) {
  const double delta = cfg.delta > 0.0 ? cfg.delta : default_margin(cfg.q);
  const int modes = cfg.modes > 0 ? cfg.modes : default_modes(cfg.q, delta);
  return {delta, modes};
}

LaurentSample sample_for(const McConfig& cfg, int modes, std::uint64_t replica) {
  return cfg.q == 0.0 ? sample_gaf_disk(cfg.r, modes, cfg.seed, replica)
                      : sample_gaf_annulus(cfg.q, cfg.r, modes, cfg.seed, replica);
}

struct Moments {
  double mean, std_error;
};

Moments moments(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

// Horner over the non-negative modes in z and the negative modes in 1/z, so
// no power of z is ever formed explicitly.
cplx LaurentSample::operator()(cplx z) const {
  const int split = std::max(0, -min_mode);
  cplx pos = 0.0, neg = 0.0;
  const cplx y = 1.0 / z;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(split);) pos = pos * z + coeffs[k];
  for (int k = 0; k < split; ++k) neg = (neg + coeffs[static_cast<std::size_t>(k)]) * y;
  if (min_mode > 0) pos *= std::pow(z, min_mode);
  return pos + neg;
}

cplx LaurentSample::derivative(cplx z) const {
  const int split = std::max(0, -min_mode);
  const cplx y = 1.0 / z;
  // d/dz sum_{n>=0} c_n z^n
  cplx p = 0.0, dp = 0.0;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(split);) {
    dp = dp * z + p;
    p = p * z + coeffs[k];
  }
  if (min_mode > 0) {
    const cplx zm = std::pow(z, min_mode);
    dp = zm * (dp + static_cast<double>(min_mode) * p / z);
  }
  // d/dz sum_{m>=1} c_{-m} y^m = -y^2 sum m c_{-m} y^(m-1)
  cplx g = 0.0, dg = 0.0;
  for (int k = 0; k < split; ++k) {
    dg = dg * y + g;
    g = g * y + coeffs[static_cast<std::size_t>(k)];
  }
  // g(y) = sum_{m=1..split} c_{-m} y^(m-1) after multiplying by y
  const cplx neg_deriv = -y * y * (g + y * dg);
  return dp + neg_deriv;
}

double LaurentSample::scale(cplx z) const {
  const int split = std::max(0, -min_mode);
  const double az = std::abs(z), ay = 1.0 / az;
  double pos = 0.0, neg = 0.0;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(split);) pos = pos * az + std::abs(coeffs[k]);
  for (int k = 0; k < split; ++k) neg = (neg + std::abs(coeffs[static_cast<std::size_t>(k)])) * ay;
  if (min_mode > 0) pos *= std::pow(az, min_mode);
  return pos + neg;
}

LaurentSample sample_gaf_annulus(double q, double r, int N, std::uint64_t seed, std::uint64_t replica) {
  const Nome nm(q);
  require(!nm.is_disk(), Errc::UnsupportedModulus, "annulus GAF needs q > 0");
  require(r > 0.0, Errc::OutOfRange, "weight r must be positive");
  require(N >= 1, Errc::OutOfRange, "N must be at least 1");
  const double p = nm.p();
  return draw(-N, N, q, r, seed, replica, [&](int n) { return 1.0 / std::sqrt(1.0 + r * std::pow(p, n)); });
}

LaurentSample sample_gaf_disk(double r, int N, std::uint64_t seed, std::uint64_t replica) {
  require(r >= 0.0, Errc::OutOfRange, "weight r must be non-negative");
  require(N >= 1, Errc::OutOfRange, "N must be at least 1");
  return draw(0, N, 0.0, r, seed, replica, [&](int n) { return n == 0 ? 1.0 / std::sqrt(1.0 + r) : 1.0; });
}

LaurentSample sample_gaf2_annulus(double q, int N, std::uint64_t seed, std::uint64_t replica) {
  const Nome nm(q);
  require(!nm.is_disk(), Errc::UnsupportedModulus, "annulus GAF needs q > 0");
  require(N >= 1, Errc::OutOfRange, "N must be at least 1");
  const double c_minus = sk_constant(nm) - 0.5 / std::log(q);
  require(c_minus > 0.0, Errc::OutOfRange, "a(q) - 1/(2 log q) must be positive");
  const double p = nm.p();
  return draw(-N, N, q, 1.0, seed, replica, [&](int n) {
    if (n == -1) return std::sqrt(c_minus);
    return std::sqrt((n + 1.0) / (1.0 - std::pow(p, n + 1)));
  });
}

LaurentSample deterministic_sample(std::vector<cplx> coeffs, int min_mode, double q) {
  require(!coeffs.empty(), Errc::OutOfRange, "need at least one coefficient");
  LaurentSample s;
  s.min_mode = min_mode;
  s.max_mode = min_mode + static_cast<int>(coeffs.size()) - 1;
  s.coeffs = std::move(coeffs);
  s.q = q;
  s.truncated = false;
  return s;
}

double default_margin(double q) { return 0.2 * (1.0 - q); }

int default_modes(double q, double delta) {
  require(delta > 0.0 && delta < (1.0 - q) / 4.0, Errc::OutOfRange, "margin must lie in (0, (1 - q)/4)");
  double ratio = 1.0 - delta;
  if (q > 0.0) ratio = std::max(ratio, q / (q + delta));
  const int n = static_cast<int>(std::ceil(std::log(1e-12) / std::log(ratio)));
  return std::clamp(n, 1, kModeCap);
}

double truncation_tail(double q, double r, int N, double delta) {
  const double outer = 1.0 - delta;
  double tail = std::pow(outer, N + 1) / delta;
  if (q > 0.0) {
    // |c_{-n}| <= q^n / sqrt r for the negative modes
    const double ratio = q / (q + delta);
    tail = std::max(tail, std::pow(ratio, N + 1) / ((1.0 - ratio) * std::sqrt(r)));
  }
  return tail;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> a, RootSolver solver) {
  while (a.size() > 1 && a.back() == 0.0) a = a.first(a.size() - 1);
  std::size_t at_zero = 0;
  while (a.size() > 1 && a.front() == 0.0) {
    a = a.subspan(1);
    ++at_zero;
  }
  if (at_zero > 0) {
    std::vector<cplx> roots(at_zero, cplx(0.0));
    if (a.size() >= 2) {
      const auto rest = polynomial_roots(a, solver);
      roots.insert(roots.end(), rest.begin(), rest.end());
    }
    return roots;
  }
  require(a.size() >= 2, Errc::OutOfRange, "polynomial has no roots");
  const std::size_t degree = a.size() - 1;
  if (degree == 1) return {-a[0] / a[1]};
  if (solver == RootSolver::automatic) solver = degree <= 16 ? RootSolver::companion : RootSolver::aberth;
  if (solver == RootSolver::companion) return companion_roots(a);
  try {
    return aberth_roots(a);
  } catch (const Error&) {
    return companion_roots(a);
  }
}

ZeroSet find_zeros(const LaurentSample& sample, double delta, RootSolver solver) {
  const double q = sample.q;
  require(delta > 0.0 && delta < (1.0 - q) / 4.0, Errc::OutOfRange, "margin must lie in (0, (1 - q)/4)");
  const int N = sample.max_mode;
  if (sample.truncated) {
    const double tail = truncation_tail(q, q == 0.0 ? 1.0 : sample.r, N, delta);
    require(tail < kTailTol, Errc::TruncationInsufficient, "truncation tail above 1e-10 at the margin");
  }
  ZeroSet out;
  out.inner = q > 0.0 ? q + delta : 0.0;
  out.outer = 1.0 - delta;
  // Drop end modes that are negligible throughout the margin annulus; they
  // only move roots far outside it.
  const double r_in = q > 0.0 ? out.inner : out.outer;
  // log of |c_n| rho^n; underflowed coefficients give -inf
  auto log_term = [&](std::size_t k) {
    const int n = sample.min_mode + static_cast<int>(k);
    return std::log(std::abs(sample.coeffs[k])) + n * std::log(n < 0 ? r_in : out.outer);
  };
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sample.coeffs.size(); ++k) peak = std::max(peak, log_term(k));
  const double cut = peak + std::log(1e-22);
  std::size_t first = 0, last = sample.coeffs.size();
  while (first + 1 < last && log_term(first) < cut) ++first;
  while (last - 1 > first && log_term(last - 1) < cut) --last;
  const std::span<const cplx> kept(sample.coeffs.data() + first, last - first);
  const auto roots = kept.size() > 1 ? polynomial_roots(kept, solver) : std::vector<cplx>{};
  for (cplx z : roots) {
    const double m = std::abs(z);
    // polishing moves a root only slightly, so a band of delta/4 is enough
    if (m < out.inner - 0.25 * delta || m > out.outer + 0.25 * delta) continue;
    for (int step = 0; step < kNewtonSteps; ++step) {
      const cplx d = sample.derivative(z);
      if (d == 0.0) break;
      z -= sample(z) / d;
    }
    const double a = std::abs(z);
    if (a <= out.inner || a >= out.outer) continue;
    const double res = std::abs(sample(z)) / sample.scale(z);
    require(res < kResidualTol, Errc::NonConvergedRoot, "Newton polishing stalled");
    out.residual_max = std::max(out.residual_max, res);
    out.zeros.push_back(z);
  }
  return out;
}

std::vector<DensityBin> mc_density(const McConfig& cfg, int radial_bins) {
  require(cfg.n_samples >= 100, Errc::InsufficientStatistics, "need at least 100 samples");
  require(radial_bins >= 1, Errc::OutOfRange, "need at least one bin");
  const Plan plan = plan_for(cfg);
  const double lo = cfg.q > 0.0 ? cfg.q + plan.delta : 0.0;
  const double hi = 1.0 - plan.delta;
  const auto nb = static_cast<std::size_t>(radial_bins);
  const auto ns = static_cast<std::size_t>(cfg.n_samples);

  std::vector<std::vector<double>> counts(ns, std::vector<double>(nb, 0.0));
  detail::for_each_index(ns, cfg.exec, [&](std::size_t k) {
    const ZeroSet zs = find_zeros(sample_for(cfg, plan.modes, k), plan.delta);
    for (cplx z : zs.zeros) {
      const auto b = static_cast<std::size_t>((std::abs(z) - lo) / (hi - lo) * radial_bins);
      if (b < nb) counts[k][b] += 1.0;
    }
  });

  std::vector<DensityBin> bins;
  std::vector<double> column(ns);
  for (std::size_t b = 0; b < nb; ++b) {
    const double s0 = lo + (hi - lo) * b / radial_bins;
    const double s1 = lo + (hi - lo) * (b + 1) / radial_bins;
    const double measure = s1 * s1 - s0 * s0;  // area / pi
    for (std::size_t k = 0; k < ns; ++k) column[k] = counts[k][b] / measure;
    const Moments m = moments(column);
    const double analytic = radial_mass(s0, s1, cfg.r, cfg.q) / measure;
    const double z = m.std_error > 0.0 ? (m.mean - analytic) / m.std_error
                                       : std::numeric_limits<double>::infinity();
    bins.push_back({s0, s1, {m.mean, m.std_error, ns}, analytic, z});
  }
  return bins;
}

PairEstimate mc_pair_statistic(const McConfig& cfg, const PairGeometry& g) {
  require(cfg.q > 0.0, Errc::UnsupportedModulus, "pair statistic runs on the annulus");
  require(cfg.n_samples >= 100, Errc::InsufficientStatistics, "need at least 100 samples");
  require(g.rotations >= 2 && g.rotations % 2 == 0, Errc::OutOfRange, "rotations must be even");
  const Plan plan = plan_for(cfg);
  const double lo = g.x - g.half_width, hi = g.x + g.half_width;
  require(lo > cfg.q + plan.delta && hi < 1.0 - plan.delta, Errc::OutOfRange, "pair cells leave the margin annulus");

  const int K = g.rotations;
  const auto ns = static_cast<std::size_t>(cfg.n_samples);
  std::vector<double> joint(ns, 0.0);
  detail::for_each_index(ns, cfg.exec, [&](std::size_t k) {
    const ZeroSet zs = find_zeros(sample_for(cfg, plan.modes, k), plan.delta);
    std::vector<int> cell(static_cast<std::size_t>(K), 0);
    for (cplx z : zs.zeros) {
      const double a = std::abs(z);
      if (a < lo || a >= hi) continue;
      // cell c is centred on angle 2 pi c / K
      const double t = std::arg(z) / (2.0 * std::numbers::pi) * K + 0.5;
      const int c = static_cast<int>(std::floor(t)) % K;
      cell[static_cast<std::size_t>((c + K) % K)] += 1;
    }
    double s = 0.0;
    for (int c = 0; c < K / 2; ++c) s += cell[c] * cell[c + K / 2];
    joint[k] = s;
  });

  double events = 0.0;
  for (double j : joint) events += j;
  require(events >= 50.0, Errc::InsufficientStatistics, "fewer than 50 joint events");

  // expected count per cell under rho^1
  const double mu = radial_mass(lo, hi, cfg.r, cfg.q) / K;
  const double norm = (K / 2) * mu * mu;
  std::vector<double> unfolded(ns);
  for (std::size_t k = 0; k < ns; ++k) unfolded[k] = joint[k] / norm;
  const Moments m = moments(unfolded);
  return {{m.mean, m.std_error, ns}, G_vee(g.x, cfg.r, Nome(cfg.q)), static_cast<std::size_t>(events)};
}

CovarianceCheck conditional_covariance_check(const McConfig& cfg, std::span<const cplx> anchors,
                                             std::span<const cplx> probes) {
  require(cfg.n_samples >= 100, Errc::InsufficientStatistics, "need at least 100 samples");
  require(!probes.empty(), Errc::OutOfRange, "need probe points");
  const Nome nm(cfg.q);
  const Plan plan = plan_for(cfg);
  const double lo = cfg.q > 0.0 ? cfg.q + plan.delta : 0.0, hi = 1.0 - plan.delta;
  const AnchorList list({anchors.begin(), anchors.end()}, nm);
  for (cplx a : anchors) require(std::abs(a) > lo && std::abs(a) < hi, Errc::OutOfAnnulus, "anchor outside the margin");
  for (cplx z : probes) require(std::abs(z) > lo && std::abs(z) < hi, Errc::OutOfAnnulus, "probe outside the margin");

  const double reff = list.effective_weight(cfg.r);
  const McConfig inner{cfg.q, reff, cfg.n_samples, cfg.seed, plan.delta, plan.modes, cfg.exec};
  const Kernel base = [&](cplx z, cplx w) {
    return nm.is_disk() ? szego_disk(z, w, cfg.r) : szego_annulus(z, w, cfg.r, nm);
  };

  std::vector<cplx> pts(probes.begin(), probes.end());
  pts.insert(pts.end(), anchors.begin(), anchors.end());
  std::vector<cplx> gamma(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) gamma[i] = anchor_gamma(pts[i], list, nm);

  const auto ns = static_cast<std::size_t>(cfg.n_samples);
  std::vector<std::vector<cplx>> values(ns);
  detail::for_each_index(ns, cfg.exec, [&](std::size_t k) {
    const LaurentSample s = sample_for(inner, plan.modes, k);
    values[k].resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) values[k][i] = gamma[i] * s(pts[i]);
  });

  CovarianceCheck out;
  out.n_samples = ns;
  for (const auto& v : values)
    for (std::size_t i = probes.size(); i < pts.size(); ++i) out.anchors_vanish &= (v[i] == 0.0);

  std::vector<double> re(ns), im(ns);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = i; j < probes.size(); ++j) {
      for (std::size_t k = 0; k < ns; ++k) {
        const cplx prod = values[k][i] * std::conj(values[k][j]);
        re[k] = prod.real();
        im[k] = prod.imag();
      }
      const cplx target = conditional_kernel(base, anchors, probes[i], probes[j]);
      const Moments mr = moments(re), mi = moments(im);
      out.max_residual = std::max(out.max_residual, std::abs(mr.mean - target.real()) / mr.std_error);
      if (i != j) out.max_residual = std::max(out.max_residual, std::abs(mi.mean - target.imag()) / mi.std_error);
    }
  }
  return out;
}

}  // namespace agaf
