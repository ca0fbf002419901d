#include "agaf/pointprocess.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "agaf/elliptic.hpp"
#include "agaf/kernels.hpp"
#include "parallel.hpp"

namespace agaf {

namespace {

void require_square(const CMatrix& m) {
  require(m.rows() == m.cols(), Errc::DimensionMismatch, "matrix must be square");
}

struct SignedPerm {
  std::vector<int> perm;
  int sign;
};

std::vector<SignedPerm> signed_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<SignedPerm> out;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
    out.push_back({p, inversions % 2 == 0 ? 1 : -1});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool in_open_annulus(cplx z, const Nome& nm) {
  const double a = std::abs(z);
  return a > nm.q() && a < 1.0;
}

bool has_coincidence(std::span<const cplx> pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(pts[i] - pts[j]) < 1e-12 * (1.0 + std::abs(pts[i]))) return true;
  return false;
}

double prod_norm(std::span<const cplx> pts) {
  double s = 1.0;
  for (cplx z : pts) s *= std::norm(z);
  return s;
}

template <class Th>
double theta_real(Th&& th, double x) {
  return th(cplx(x)).real();
}

// Closed form of rho^2 / (rho^1 rho^1) for a theta-like function th;
// th(x) = 1 - x gives the disk.
template <class Th>
double unfolded_impl(cplx z, cplx w, double r, Th&& th) {
  const double a2 = std::norm(z), b2 = std::norm(w);
  const cplx x = z * std::conj(w);
  auto t = [&](double u) { return theta_real(th, u); };
  double num = t(-r * a2) * t(-r * b2) * t(-r * a2 * a2 * b2) * t(-r * a2 * b2 * b2);
  num *= num;
  const double mid = t(-r * a2 * b2);
  const double den = t(-r) * t(-r * a2 * a2) * t(-r * b2 * b2) * t(-r * a2 * a2 * b2 * b2) * std::pow(mid, 4);
  const double ratio = t(a2) * t(b2) / (t(-r * a2 * a2 * b2) * t(-r * a2 * b2 * b2));
  const double mod = std::pow(std::abs(th(-r * x * a2 * b2)) / std::abs(th(x)), 4);
  return num / den * (1.0 - ratio * ratio * mod);
}

template <class Th>
double extremes_impl(double a, double b, double r, int sign, Th&& th) {
  auto t = [&](double u) { return theta_real(th, u); };
  const double s = sign >= 0 ? 1.0 : -1.0;
  const double a2 = a * a, b2 = b * b;
  double lead = t(s * a / b) * t(-r * a2) * t(-r * b2);
  lead *= lead;
  const double tab = t(s * a * b);
  const double den = t(-r) * t(-r * a2 * a2) * t(-r * b2 * b2) * std::pow(tab, 4) * std::pow(t(-r * a2 * b2), 3);
  const double cross = t(-s * r * a2 * a * b2 * b);
  const double bracket = t(-r * a2 * a2 * b2) * t(-r * a2 * b2 * b2) * tab * tab + t(a2) * t(b2) * cross * cross;
  return b2 * lead / den * bracket;
}

auto disk_theta = [](cplx x) { return 1.0 - x; };

// Extended-precision theta for real arguments; the stencils below divide by h^4.
long double theta_ld(long double x, long double p) {
  long double v = 1.0L, pk = 1.0L;
  for (int i = 0; i < 1'000'000; ++i) {
    const long double a = x * pk, b = pk * p / x;
    v *= (1.0L - a) * (1.0L - b);
    if (std::fabs(a) + std::fabs(b) < 1e-22L) break;
    pk *= p;
  }
  return v;
}

long double g_tilde_ld(long double c, long double r, long double q) {
  const long double p = q * q;
  auto t = [&](long double u) { return theta_ld(u, p); };
  const long double trc3 = t(-r * c * c * c);
  const long double lead = c * std::pow(t(-r * c), 4) * std::pow(t(-1.0L) * trc3, 2) /
                           (t(-r) * std::pow(t(-c), 2) * std::pow(t(-r * c * c), 5));
  const long double ratio = t(c) * t(r * c * c * c) / (t(-c) * trc3);
  return lead * (1.0L + ratio * ratio);
}

}  // namespace

cplx per_naive(const CMatrix& m) {
  require_square(m);
  const int n = static_cast<int>(m.rows());
  require(n <= 12, Errc::OutOfRange, "permanent limited to n <= 12");
  if (n == 0) return 1.0;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  cplx sum = 0.0;
  do {
    cplx term = 1.0;
    for (int i = 0; i < n; ++i) term *= m(i, p[i]);
    sum += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return sum;
}

cplx per_ryser(const CMatrix& m) {
  require_square(m);
  const int n = static_cast<int>(m.rows());
  require(n <= 12, Errc::OutOfRange, "permanent limited to n <= 12");
  if (n == 0) return 1.0;
  // Gray-code walk over column subsets; row sums updated one column at a time.
  std::vector<cplx> rowsum(n, 0.0);
  cplx total = 0.0;
  unsigned gray = 0;
  const unsigned count = 1u << n;
  for (unsigned k = 1; k < count; ++k) {
    const unsigned next = k ^ (k >> 1);
    const unsigned flip = next ^ gray;
    const int col = std::countr_zero(flip);
    const double dir = (next & flip) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += dir * m(i, col);
    gray = next;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    const int size = std::popcount(gray);
    total += ((n - size) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

cplx per(const CMatrix& m) {
  require_square(m);
  return m.rows() <= 8 ? per_naive(m) : per_ryser(m);
}

cplx det(const CMatrix& m) {
  require_square(m);
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

cplx perdet(const CMatrix& m) { return per(m) * det(m); }

cplx hyperdet23(const Tensor3& c) {
  const int n = c.size();
  require(n >= 1 && n <= 5, Errc::DimensionMismatch, "hyperdet23 needs 1 <= n <= 5");
  const auto perms = signed_permutations(n);
  cplx sum = 0.0;
  for (const auto& s2 : perms) {
    for (const auto& s3 : perms) {
      cplx term = static_cast<double>(s2.sign * s3.sign);
      for (int l = 0; l < n; ++l) term *= c(l, s2.perm[l], s3.perm[l]);
      sum += term;
    }
  }
  return sum;
}

double rho_n_annulus(std::span<const cplx> points, double r, const Nome& nm) {
  require(!points.empty() && points.size() <= 8, Errc::OutOfRange, "rho_n needs 1 <= n <= 8");
  for (cplx z : points) require(in_open_annulus(z, nm), Errc::OutOfAnnulus, "point outside the annulus");
  if (has_coincidence(points)) return 0.0;
  const double p2 = prod_norm(points);
  const auto n = static_cast<Eigen::Index>(points.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = szego_annulus(points[i], points[j], r * p2, nm);
  const cplx pref = theta(-r, nm) / theta(-r * p2 * p2, nm);
  return (pref * perdet(m)).real();
}

double rho_n_annulus_hyperdet(std::span<const cplx> points, double r, const Nome& nm) {
  require(!points.empty() && points.size() <= 5, Errc::OutOfRange, "hyperdeterminant form needs n <= 5");
  for (cplx z : points) require(in_open_annulus(z, nm), Errc::OutOfAnnulus, "point outside the annulus");
  const double p2 = prod_norm(points);
  const int n = static_cast<int>(points.size());
  Tensor3 c(n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        c(i1, i2, i3) = szego_annulus(points[i2], points[i1], r * p2, nm) *
                        szego_annulus(points[i2], points[i3], r * p2, nm);
  const cplx pref = theta(-r, nm) / theta(-r * p2 * p2, nm);
  return (pref * hyperdet23(c)).real();
}

double rho_n_disk(std::span<const cplx> points, double r) {
  require(!points.empty() && points.size() <= 8, Errc::OutOfRange, "rho_n needs 1 <= n <= 8");
  require(r >= 0.0, Errc::OutOfRange, "weight must be non-negative");
  for (cplx z : points) require(std::abs(z) < 1.0, Errc::OutOfDisk, "point outside the disk");
  if (has_coincidence(points)) return 0.0;
  const double p2 = prod_norm(points);
  const auto n = static_cast<Eigen::Index>(points.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = szego_disk(points[i], points[j], r * p2);
  return ((1.0 + r) / (1.0 + r * p2 * p2) * perdet(m)).real();
}

double density_annulus(double abs_z, double r, const Nome& nm) {
  require(abs_z > nm.q() && abs_z < 1.0, Errc::OutOfAnnulus, "point outside the annulus");
  const double x = abs_z * abs_z;
  const double q0 = nm.q0();
  const double num = q0 * q0 * q0 * q0 * theta(-r, nm).real() * theta(-r * x * x, nm).real();
  const double den = theta(-r * x, nm).real() * theta(x, nm).real();
  return num / (den * den);
}

double density_disk(double abs_z, double r) {
  require(abs_z >= 0.0 && abs_z < 1.0, Errc::OutOfDisk, "point outside the disk");
  const double x = abs_z * abs_z;
  const double d = (1.0 + r * x) * (1.0 - x);
  return (1.0 + r) * (1.0 + r * x * x) / (d * d);
}

double unfolded_g(cplx z, cplx w, double r, const Nome& nm, Domain domain) {
  if (domain == Domain::disk) {
    require(std::abs(z) < 1.0 && std::abs(w) < 1.0, Errc::OutOfDomain, "points must lie in the disk");
    return unfolded_impl(z, w, r, disk_theta);
  }
  require(!nm.is_disk() && in_open_annulus(z, nm) && in_open_annulus(w, nm), Errc::OutOfDomain,
          "points must lie in the annulus");
  return unfolded_impl(z, w, r, [&](cplx x) { return theta(x, nm); });
}

double g_extremes(double a, double b, double r, const Nome& nm, int sign) {
  if (nm.is_disk()) {
    require(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0, Errc::OutOfRange, "disk radii must lie in (0, 1]");
    return extremes_impl(a, b, r, sign, disk_theta);
  }
  require(a > nm.q() && a < 1.0 && b > nm.q() && b < 1.0, Errc::OutOfAnnulus, "radii must lie in (q, 1)");
  return extremes_impl(a, b, r, sign, [&](cplx x) { return theta(x, nm); });
}

double g_disk_upper_closed(double a, double b, double r) {
  const double a2 = a * a, b2 = b * b, ab = a * b;
  const double edge = 2.0 - a2 + 2.0 * ab - b2 + 2.0 * a2 * b2;
  const double middle = a2 - 2.0 * ab + 4.0 * a2 * ab + b2 + a2 * a2 * b2 + 4.0 * ab * b2 - 2.0 * a2 * ab * b2 +
                        a2 * b2 * b2;
  const double poly = std::pow(ab, 6) * edge * r * r + a2 * b2 * middle * r + edge;
  const double num = std::pow(a + b, 2) * std::pow(1.0 + r * a2, 2) * std::pow(1.0 + r * b2, 2);
  const double den = std::pow(1.0 + ab, 4) * (1.0 + r) * (1.0 + r * a2 * a2) * (1.0 + r * b2 * b2) *
                     std::pow(1.0 + r * a2 * b2, 3);
  return num / den * poly;
}

double g_tilde_disk(double r) {
  const double s = std::sqrt(r);
  return (6.0 + r + 1.0 / r) / (4.0 * (s + 1.0 / s));
}

double G_wedge(double x, double r, const Nome& nm) {
  require(!nm.is_disk() && x > std::sqrt(nm.q()) && x < 1.0, Errc::OutOfRange, "G_wedge needs sqrt(q) < x < 1");
  return unfolded_g(nm.q() / x, x, r, nm, Domain::annulus);
}

double G_wedge_closed(double x, double r, const Nome& nm) {
  require(!nm.is_disk() && x > std::sqrt(nm.q()) && x < 1.0, Errc::OutOfRange, "G_wedge needs sqrt(q) < x < 1");
  const double q = nm.q(), x2 = x * x;
  auto t = [&](double u) { return theta(u, nm).real(); };
  const double pair = t(-r * x2) * t(-x2 / r);
  const double tq = t(q);
  const double lead = r * r * std::pow(t(q * x2), 2) * std::pow(pair, 3) /
                      (x2 * tq * tq * std::pow(t(-r), 4) * t(-r * x2 * x2) * t(-x2 * x2 / r));
  const double tail = std::pow(t(-r * q) * t(x2), 2) / (tq * tq * pair);
  return lead * (1.0 + tail);
}

double wedge_coefficient(double r, const Nome& nm) {
  const double q = nm.q(), q0 = nm.q0();
  auto t = [&](double u) { return theta(u, nm).real(); };
  return 8.0 * std::pow(q0, 4) * r * r * r * std::pow(t(-q * r), 6) / (q * q * std::pow(t(q), 2) * std::pow(t(-r), 6));
}

double G_vee(double x, double r, const Nome& nm) {
  require(!nm.is_disk() && x > nm.q() && x < 1.0, Errc::OutOfRange, "G_vee needs q < x < 1");
  return unfolded_g(-x, x, r, nm, Domain::annulus);
}

double G_tilde(double c, double r, const Nome& nm) {
  require(!nm.is_disk() && c > nm.p() && c <= 1.0, Errc::OutOfRange, "G_tilde needs q^2 < c <= 1");
  auto t = [&](double u) { return theta(u, nm).real(); };
  const double trc3 = t(-r * c * c * c);
  const double lead = c * std::pow(t(-r * c), 4) * std::pow(t(-1.0) * trc3, 2) /
                      (t(-r) * std::pow(t(-c), 2) * std::pow(t(-r * c * c), 5));
  const double ratio = t(c) * t(r * c * c * c) / (t(-c) * trc3);
  return lead * (1.0 + ratio * ratio);
}

TildeDerivatives G_tilde_derivatives_at_one(double r, const Nome& nm, double h) {
  require(!nm.is_disk() && h > 0.0 && 1.0 - 5.0 * h > nm.p(), Errc::OutOfRange, "stencil leaves (q^2, 1]");
  // forward 6-point weights for derivative orders 1..4, with their accuracy order
  static constexpr std::array<std::array<long double, 6>, 4> kWeights{{
      {-137.0L / 60.0L, 5.0L, -5.0L, 10.0L / 3.0L, -5.0L / 4.0L, 1.0L / 5.0L},
      {15.0L / 4.0L, -77.0L / 6.0L, 107.0L / 6.0L, -13.0L, 61.0L / 12.0L, -5.0L / 6.0L},
      {-17.0L / 4.0L, 71.0L / 4.0L, -59.0L / 2.0L, 49.0L / 2.0L, -41.0L / 4.0L, 7.0L / 4.0L},
      {3.0L, -14.0L, 26.0L, -24.0L, 11.0L, -2.0L},
  }};
  static constexpr std::array<int, 4> kAccuracy{5, 4, 3, 2};
  constexpr int kLevels = 4;

  // table[m][level][col], Richardson across halvings of h
  std::array<std::array<std::array<long double, kLevels>, kLevels>, 4> table{};
  for (int level = 0; level < kLevels; ++level) {
    const long double step = h / std::pow(2.0L, level);
    std::array<long double, 6> f{};
    for (int k = 0; k < 6; ++k) f[k] = g_tilde_ld(1.0L - k * step, r, nm.q());
    for (int m = 0; m < 4; ++m) {
      long double s = 0.0L;
      for (int k = 0; k < 6; ++k) s += kWeights[m][k] * f[k];
      // stepping backwards flips odd orders
      table[m][level][0] = ((m % 2 == 0) ? -1.0L : 1.0L) * s / std::pow(step, m + 1);
      for (int col = 1; col <= level; ++col) {
        const long double w = std::pow(2.0L, kAccuracy[m] + col - 1);
        table[m][level][col] = (w * table[m][level][col - 1] - table[m][level - 1][col - 1]) / (w - 1.0L);
      }
    }
  }
  auto best = [&](int m) { return static_cast<double>(table[m][kLevels - 1][kLevels - 1]); };
  return {best(0), best(1), best(2), best(3)};
}

double G_vee_sqrtq_r1(const Nome& nm) {
  const double q = nm.q(), p = nm.p();
  const double q1 = qpoch(-p, p).real();
  const double q2 = qpoch(-q, p).real();
  const double q3 = qpoch(q, p).real();
  return (std::pow(q2, 8) + std::pow(q3, 8)) / (16.0 * q * std::pow(q1, 8));
}

double kappa(double r, const Nome& nm) {
  require(r > 0.0, Errc::OutOfRange, "kappa needs r > 0");
  const SpecialValues sv = special_values(nm);
  const double w = wp(cplx(std::numbers::pi, -std::log(r)), nm).real();
  return 5.0 * w * w + 2.0 * sv.e1 * w - (sv.e1 * sv.e1 + sv.g2 / 2.0);
}

double kappa0(double r) {
  return -(r * r * r * r + 12.0 * r * r * r - 58.0 * r * r + 12.0 * r + 1.0) / (16.0 * std::pow(1.0 + r, 4));
}

double r_critical() {
  const double s6 = std::sqrt(6.0);
  return 2.0 * s6 - 3.0 - 2.0 * std::sqrt(8.0 - 3.0 * s6);
}

CriticalCurvePoint r0(double q) {
  require(q > 0.0, Errc::UnsupportedModulus, "r0 needs q > 0");
  const Nome nm(q);
  const HalfPeriodGaps g = half_period_gaps(nm);
  // wp_plus = e2 + v d12 with 10 d12 v^2 + (20 e2 + 4 e1) v + 6 e3 = 0, e's rebuilt from the gaps
  const double e1 = (2.0 * g.d12 + g.d23) / 3.0;
  const double e2 = e1 - g.d12, e3 = e2 - g.d23;
  const double a = 10.0 * g.d12, b = 20.0 * e2 + 4.0 * e1, c = 6.0 * e3;
  const double v = -2.0 * c / (b + std::sqrt(b * b - 4.0 * a * c));
  require(v > 0.0 && v < 1.0, Errc::NonConvergent, "wp_plus left (e2, e1)");
  const double r0v = std::exp(-wp_inverse_fraction(v, nm));
  require(r0v > q && r0v < 1.0, Errc::NonConvergent, "r0 left (q, 1)");
  return {q, r0v, e2 + v * g.d12, kappa(r0v, nm)};
}

double d_tilde(double a, double b, double s) {
  auto p = [](double x) { return x + 1.0 / x; };
  const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2, a7 = a4 * a3;
  const double b2 = b * b, b4 = b2 * b2;
  return p(a7 * b4 * std::pow(s, 5)) + 13.0 * p(a3 * b2 * s * s * s) - 46.0 * p(a4 * b2 * s);
}

PhaseScan repulsive_phase_check(double r, int grid_n, Exec exec) {
  require(r >= 0.0, Errc::OutOfRange, "weight must be non-negative");
  require(grid_n >= 1 && grid_n <= 400, Errc::OutOfRange, "grid_n must be in [1, 400]");
  const Nome disk(0.0);
  const double s = std::sqrt(r);
  const auto n = static_cast<std::size_t>(grid_n);
  std::vector<PhaseScan> rows(n);
  detail::for_each_index(n, exec, [&](std::size_t i) {
    const double a = static_cast<double>(i + 1) / (grid_n + 1);
    PhaseScan row{-std::numeric_limits<double>::infinity(), a, 0.0, std::numeric_limits<double>::infinity()};
    for (int j = 1; j <= grid_n; ++j) {
      const double b = static_cast<double>(j) / (grid_n + 1);
      const double g = g_extremes(a, b, r, disk, -1);
      if (g > row.max_g) {
        row.max_g = g;
        row.arg_b = b;
      }
      if (r > 0.0) row.min_d_tilde = std::min(row.min_d_tilde, d_tilde(a, b, s));
    }
    rows[i] = row;
  });
  PhaseScan best = rows.front();
  for (const auto& row : rows) {
    if (row.max_g > best.max_g) {
      best.max_g = row.max_g;
      best.arg_a = row.arg_a;
      best.arg_b = row.arg_b;
    }
    best.min_d_tilde = std::min(best.min_d_tilde, row.min_d_tilde);
  }
  return best;
}

double frobenius_residual(std::span<const cplx> points, double s, const Nome& nm) {
  require(!points.empty() && points.size() <= 6, Errc::OutOfRange, "frobenius check needs 1 <= n <= 6");
  require(s > 0.0, Errc::OutOfRange, "s must be positive");
  for (cplx z : points) require(in_open_annulus(z, nm), Errc::OutOfAnnulus, "point outside the annulus");
  const auto n = static_cast<Eigen::Index>(points.size());
  cplx lhs = std::pow(nm.q0(), 2.0 * static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx zi = points[i], zj = points[j];
      lhs *= std::norm(zj) * theta(zi / zj, nm) * theta(std::conj(zi) / std::conj(zj), nm);
    }
    for (Eigen::Index j = 0; j < n; ++j) lhs /= theta(points[i] * std::conj(points[j]), nm);
  }
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = szego_annulus(points[i], points[j], s, nm);
  const cplx rhs = theta(-s, nm) / theta(-s * prod_norm(points), nm) * det(m);
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace agaf
