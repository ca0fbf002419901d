#include "agaf/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "agaf/elliptic.hpp"
#include "agaf/kernels.hpp"
#include "agaf/pointprocess.hpp"
#include "agaf/theta.hpp"

namespace agaf {

namespace {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double phase() { return uniform(-std::numbers::pi, std::numbers::pi); }

  // keeps 5% of the width away from both circles
  cplx in_annulus(double q) {
    const double pad = 0.05 * (1.0 - q);
    return std::polar(uniform(q + pad, 1.0 - pad), phase());
  }
  std::vector<cplx> points(int n, double q) {
    std::vector<cplx> pts;
    while (static_cast<int>(pts.size()) < n) {
      const cplx z = in_annulus(q);
      if (std::all_of(pts.begin(), pts.end(), [&](cplx w) { return std::abs(z - w) > 1e-2; })) pts.push_back(z);
    }
    return pts;
  }
  cplx gaussian() {
    std::normal_distribution<double> nd(0.0, 1.0);
    return {nd(gen_), nd(gen_)};
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

 private:
  std::mt19937_64 gen_;
};

double rel(cplx a, cplx b, double scale) { return std::abs(a - b) / scale; }
double rel(cplx a, cplx b) { return rel(a, b, std::max({std::abs(a), std::abs(b), 1e-300})); }

struct Case {
  double q, r;
};

using Check = std::function<double(const Case&, Draws&)>;

IdentityResult run(const std::string& name, const SuiteOptions& o, Draws& d, const Check& check) {
  IdentityResult res{name};
  for (int i = 0; i < o.instances; ++i) {
    const Case c{o.qs[i % o.qs.size()], o.rs[(i / o.qs.size()) % o.rs.size()]};
    res.max_residual = std::max(res.max_residual, check(c, d));
    ++res.instances;
  }
  return res;
}

}  // namespace

std::vector<IdentityResult> run_identity_suite(const SuiteOptions& o) {
  require(!o.qs.empty() && !o.rs.empty() && o.instances > 0, Errc::OutOfRange, "empty identity suite");
  Draws d(o.seed);
  std::vector<IdentityResult> out;

  out.push_back(run("theta-inversion", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const cplx z = d.in_annulus(c.q);
    return rel(theta(1.0 / z, nm), -theta(z, nm) / z);
  }));

  out.push_back(run("quasi-periodicity", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const cplx z = d.in_annulus(c.q);
    return rel(theta(nm.p() * z, nm), theta(1.0 / z, nm));
  }));

  out.push_back(run("weierstrass-addition", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const cplx x = d.in_annulus(c.q), y = d.in_annulus(c.q), u = d.in_annulus(c.q), v = d.in_annulus(c.q);
    const cplx a = theta({x * y, x / y, u * v, u / v}, nm);
    const cplx b = theta({x * v, x / v, u * y, u / y}, nm);
    const cplx rhs = u / y * theta({y * v, y / v, x * u, x / u}, nm);
    return rel(a - b, rhs, std::max({std::abs(a), std::abs(b), std::abs(rhs)}));
  }));

  out.push_back(run("frobenius", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const auto pts = d.points(d.integer(2, 5), c.q);
    return frobenius_residual(pts, c.r, nm);
  }));

  out.push_back(run("borchardt", o, d, [](const Case&, Draws& d) {
    const int n = d.integer(2, 6);
    const auto pts = d.points(n, 0.0);
    CMatrix s(n, n), s2(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        s(i, j) = szego_disk(pts[i], pts[j]);
        s2(i, j) = s(i, j) * s(i, j);
      }
    return rel(perdet(s), det(s2));
  }));

  const double sign = o.flip_mccullough_sign ? -1.0 : 1.0;
  out.push_back(run("mccullough-shen", o, d, [sign](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const auto pts = d.points(d.integer(1, 3) + 2, c.q);
    const std::vector<cplx> alphas(pts.begin() + 2, pts.end());
    const AnchorList anchors(alphas, nm);
    const Kernel base = [&](cplx z, cplx w) { return szego_annulus(z, w, c.r, nm); };
    const cplx z = pts[0], w = pts[1];
    const cplx lhs = conditional_kernel(base, alphas, z, w);
    const cplx rhs = sign * mccullough_shen(z, w, c.r, anchors, nm);
    // Cauchy-Schwarz scale of the unconditioned kernel
    const double scale = std::sqrt(std::abs(base(z, z) * base(w, w)));
    return rel(lhs, rhs, scale);
  }));

  out.push_back(run("functional-equations", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const double p = nm.p();
    const cplx z = d.in_annulus(c.q), w = d.in_annulus(c.q);
    auto S = [&](cplx a, cplx b, double r) { return szego_annulus(a, b, r, nm); };
    const double e1 = rel(S(p * z, w, c.r), -S(z, w, c.r) / c.r);
    const double e2 = rel(S(1.0 / z, w, c.r), -S(z, 1.0 / w, 1.0 / c.r));
    const double e3 = rel(S(z, w, p * c.r), S(z, w, c.r) / (z * std::conj(w)));
    return std::max({e1, e2, e3});
  }));

  out.push_back(run("kappa-symmetries", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const double p = nm.p();
    const double r = c.r * d.uniform(0.8, 1.25);
    const double k = kappa(r, nm);
    // relative to the wp scale, since kappa vanishes on the critical curve
    const double e1 = special_values(nm).e1;
    const double scale = std::abs(k) + e1 * e1;
    return std::max({std::abs(kappa(1.0 / r, nm) - k), std::abs(kappa(p * r, nm) - k), std::abs(kappa(p / r, nm) - k)}) /
           scale;
  }));

  out.push_back(run("szego-bergman", o, d, [](const Case& c, Draws& d) {
    const Nome nm(c.q);
    const cplx z = d.in_annulus(c.q), w = d.in_annulus(c.q);
    const cplx s = szego_annulus(z, w, c.q, nm);
    const cplx rhs = bergman(z, w, nm, Domain::annulus) + sk_constant(nm) / (z * std::conj(w));
    return rel(s * s, rhs);
  }));

  out.push_back(run("hyperdet-lemma", o, d, [](const Case&, Draws& d) {
    const int n = d.integer(1, 5);
    CMatrix a(n, n), b(n, n), abs_a(n, n), abs_b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = d.gaussian();
        b(i, j) = d.gaussian();
        abs_a(i, j) = std::abs(a(i, j));
        abs_b(i, j) = std::abs(b(i, j));
      }
    Tensor3 c(n);
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) c(i1, i2, i3) = a(i2, i1) * b(i2, i3);
    // scale: sum of |terms|
    const double scale = std::abs(per(abs_a)) * std::abs(per(abs_b));
    return rel(hyperdet23(c), per(a) * det(b), scale);
  }));

  return out;
}

}  // namespace agaf
