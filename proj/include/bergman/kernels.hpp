#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// Reproducing kernel of the weighted Bergman space with p = 2 as a monomial
// series: K(z, w) = sum_n c_n (conj(z) w)^n with c_n = 1 / ||z^n||^2 =
// 1 / (2 omega_{2n+1}).
class KernelSeries {
 public:
  KernelSeries(const RadialWeight& weight, int N = 512);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const RadialWeight& weight() const { return weight_; }

 private:
  RadialWeight weight_;
  std::vector<double> coeffs_;
};

struct KernelValue {
  std::complex<double> value;
  double tail_bound = 0.0;
  int terms = 0;
};

// Requires |z| |w| <= 0.99. Throws TRUNCATION_INSUFFICIENT when the tail bound
// exceeds 1e-6 of |value|.
KernelValue kernel_eval_detail(const KernelSeries& series, DiskPoint z, DiskPoint w);
std::complex<double> kernel_eval(const KernelSeries& series, DiskPoint z, DiskPoint w);

// B f(z) = \int f(u) |b_z(u)|^2 w(u) dA(u) with b_z = K(z, .) / sqrt(K(z, z)).
IntegralResult berezin(const KernelSeries& series, const std::function<double(DiskPoint)>& f, DiskPoint z,
                       const DiskGrid& grid);

struct SubmeanResult {
  double ratio = 0.0;
  double bf_center = 0.0;
  double disk_weight = 0.0;
  double disk_integral = 0.0;
};

// (Bf)^q(z) * omega(Delta(z, r)) / \int_{Delta(z, r)} (Bf)^q w dA.
SubmeanResult berezin_submean_check(const KernelSeries& series, const std::function<double(DiskPoint)>& f, double q,
                                    DiskPoint z, double r, const DiskGrid& grid, int disk_order = 8);

// ||f_xi||_{A^p_w} for f_xi(z) = ((1 - |xi|^2) / (1 - conj(xi) z))^gamma
// * (tail(|xi|) (1 - |xi|))^{-e}.
IntegralResult test_function_norm(const RadialWeight& weight, DiskPoint xi, double gamma, double p,
                                  const DiskGrid& grid, double e = 0.5);

// Largest relative deviation of the N-term kernel from 1 / (1 - conj(z) w)^{2+alpha}
// for standard_alpha(alpha), over all pairs from n points of a golden-angle
// spiral of radius max_abs.
double kernel_closed_form_deviation(double alpha, int N, int n = 20, double max_abs = 0.8);

}  // namespace bergman
