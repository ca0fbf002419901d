#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "agaf/common.hpp"
#include "agaf/theta.hpp"

namespace agaf {

using CMatrix = Eigen::MatrixXcd;

// Permanent: factorial expansion up to n = 8, Ryser's formula up to n = 12.
cplx per(const CMatrix& m);
cplx per_naive(const CMatrix& m);
cplx per_ryser(const CMatrix& m);
cplx det(const CMatrix& m);
cplx perdet(const CMatrix& m);

// Cubic n x n x n array, row-major in (i1, i2, i3).
class Tensor3 {
 public:
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n) {}
  int size() const noexcept { return n_; }
  cplx& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  cplx operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

 private:
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  int n_;
  std::vector<cplx> data_;
};

// Det_{2,3}; the sum over sigma_1 is folded out, leaving S_n^2 terms.
cplx hyperdet23(const Tensor3& c);

// Correlation functions with respect to m/pi.
double rho_n_annulus(std::span<const cplx> points, double r, const Nome& nm);
double rho_n_annulus_hyperdet(std::span<const cplx> points, double r, const Nome& nm);
double rho_n_disk(std::span<const cplx> points, double r);
double density_annulus(double abs_z, double r, const Nome& nm);
double density_disk(double abs_z, double r);

// rho^2 / (rho^1 rho^1); disk mode uses the q -> 0 closed form.
double unfolded_g(cplx z, cplx w, double r, const Nome& nm, Domain domain);
// g(sign * a, b) in closed form; sign = +1 gives the lower, -1 the upper bound.
double g_extremes(double a, double b, double r, const Nome& nm, int sign);
// Disk g(-a, b) as an explicit rational function of (a, b, r).
double g_disk_upper_closed(double a, double b, double r);
// (6 + r + 1/r) / (4 (sqrt r + 1/sqrt r))
double g_tilde_disk(double r);

double G_wedge(double x, double r, const Nome& nm);
double G_wedge_closed(double x, double r, const Nome& nm);
// Coefficient c(r) of (x - sqrt q)^2 in G_wedge at short distance.
double wedge_coefficient(double r, const Nome& nm);
double G_vee(double x, double r, const Nome& nm);
double G_tilde(double c, double r, const Nome& nm);
// (q2^8 + q3^8) / (16 q q1^8), the value of G_vee(sqrt q; 1)
double G_vee_sqrtq_r1(const Nome& nm);

// Derivatives of G_tilde at c = 1: one-sided 6-point stencils at h, h/2, h/4, h/8,
// Richardson tableau, G_tilde evaluated in long double.
struct TildeDerivatives {
  double d1, d2, d3, d4;
};
TildeDerivatives G_tilde_derivatives_at_one(double r, const Nome& nm, double h = 2e-2);

double kappa(double r, const Nome& nm);
double kappa0(double r);

struct CriticalCurvePoint {
  double q;
  double r0;
  double wp_plus;
  std::optional<double> kappa_at;
};
CriticalCurvePoint r0(double q);
// 2 sqrt 6 - 3 - 2 sqrt(8 - 3 sqrt 6)
double r_critical();

// p(a^7 b^4 s^5) + 13 p(a^3 b^2 s^3) - 46 p(a^4 b^2 s), p(x) = x + 1/x
double d_tilde(double a, double b, double s);

struct PhaseScan {
  double max_g;
  double arg_a, arg_b;
  double min_d_tilde;
};
PhaseScan repulsive_phase_check(double r, int grid_n, Exec exec = Exec::parallel);

double frobenius_residual(std::span<const cplx> points, double s, const Nome& nm);

}  // namespace agaf
