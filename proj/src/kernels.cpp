#include "bergman/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bergman/error.hpp"

namespace bergman {

KernelSeries::KernelSeries(const RadialWeight& weight, int N) : weight_(weight) {
  if (N < 1) throw std::invalid_argument("KernelSeries: N must be positive");
  coeffs_.reserve(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    const double m = weight.moment(2.0 * n + 1.0);
    if (!(m > 0.0)) throw Error(ErrorCode::Overflow, "monomial norm underflows at n = " + std::to_string(n));
    coeffs_.push_back(1.0 / (2.0 * m));
  }
}

KernelValue kernel_eval_detail(const KernelSeries& series, DiskPoint z, DiskPoint w) {
  const std::complex<double> x = std::conj(z.z()) * w.z();
  const double ax = std::abs(x);
  if (ax > 0.99 + 1e-12) throw std::invalid_argument("kernel_eval: |z||w| must not exceed 0.99");
  const auto& c = series.coeffs();
  const int N = series.order();
  KernelValue out;
  std::complex<double> sum = c[0];
  std::complex<double> pw = 1.0;
  double mag = 1.0;  // |x|^n
  int n = 0;
  while (n < N) {
    ++n;
    pw *= x;
    mag *= ax;
    const double term = c[static_cast<std::size_t>(n)] * mag;
    sum += c[static_cast<std::size_t>(n)] * pw;
    if (term == 0.0) break;
    const double g = c[static_cast<std::size_t>(n)] / c[static_cast<std::size_t>(n - 1)];
    if (g * ax < 1.0) {
      const double tail = term * g * ax / (1.0 - g * ax);
      if (tail <= 1e-17 * std::abs(sum)) {
        out.tail_bound = tail;
        break;
      }
    }
  }
  if (n == N) {
    const double term = c[static_cast<std::size_t>(N)] * mag;
    const double g = c[static_cast<std::size_t>(N)] / c[static_cast<std::size_t>(N - 1)];
    out.tail_bound = g * ax < 1.0 ? term * g * ax / (1.0 - g * ax) : INFINITY;
  }
  out.value = sum;
  out.terms = n + 1;
  if (out.tail_bound > 1e-6 * std::abs(sum)) {
    throw Error(ErrorCode::TruncationInsufficient,
                "kernel tail bound " + std::to_string(out.tail_bound) + " at N = " + std::to_string(N));
  }
  return out;
}

std::complex<double> kernel_eval(const KernelSeries& series, DiskPoint z, DiskPoint w) {
  return kernel_eval_detail(series, z, w).value;
}

IntegralResult berezin(const KernelSeries& series, const std::function<double(DiskPoint)>& f, DiskPoint z,
                       const DiskGrid& grid) {
  const double kzz = kernel_eval(series, z, z).real();
  auto integrand = Integrand::general([&](DiskPoint u) {
    const double k = std::norm(kernel_eval(series, z, u));
    return f(u) * k / kzz;
  });
  return integrate(integrand, &series.weight(), WholeDisk{}, grid);
}

SubmeanResult berezin_submean_check(const KernelSeries& series, const std::function<double(DiskPoint)>& f, double q,
                                    DiskPoint z, double r, const DiskGrid& grid, int disk_order) {
  if (!(q > 0.0)) throw std::invalid_argument("berezin_submean_check: q must be positive");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("berezin_submean_check: r must lie in (0,1)");
  const EuclideanDisk disk = pseudo_disk_euclidean(z, r);
  SubmeanResult out;
  out.bf_center = berezin(series, f, z, grid).total();
  const RadialWeight& w = series.weight();
  out.disk_weight = disk_rule(Integrand::constant(1.0), &w, disk, disk_order);
  out.disk_integral = disk_rule(
      Integrand::general([&](DiskPoint p) { return std::pow(berezin(series, f, p, grid).total(), q); }), &w, disk,
      disk_order);
  out.ratio = std::pow(out.bf_center, q) * out.disk_weight / out.disk_integral;
  return out;
}

IntegralResult test_function_norm(const RadialWeight& weight, DiskPoint xi, double gamma, double p,
                                  const DiskGrid& grid, double e) {
  if (!(gamma > 0.0) || !(p > 0.0)) throw std::invalid_argument("test_function_norm: gamma and p must be positive");
  if (!xi.in_disk()) throw std::invalid_argument("test_function_norm: xi outside the disk");
  const double a = xi.abs();
  const double log_norm = -e * (weight.log_omega_hat(a) + std::log1p(-a));
  const double num = xi.one_minus_abs2();
  const std::complex<double> cx = std::conj(xi.z());
  auto integrand = Integrand::general([&](DiskPoint z) {
    const double mod = num / std::abs(1.0 - cx * z.z());
    return std::exp(p * (gamma * std::log(mod) + log_norm));
  });
  IntegralResult res = integrate(integrand, &weight, WholeDisk{}, grid);
  // Report the norm itself; ring data stay in p-th power units.
  const double value = res.total();
  res.error_estimate = value > 0.0 ? std::pow(value, 1.0 / p) * res.error_estimate / (p * value) : 0.0;
  res.value = std::pow(value, 1.0 / p);
  res.tail = 0.0;
  return res;
}

double kernel_closed_form_deviation(double alpha, int N, int n, double max_abs) {
  const KernelSeries series(RadialWeight::standard_alpha(alpha), N);
  const double golden = 3.14159265358979323846 * (3.0 - std::sqrt(5.0));
  std::vector<DiskPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double r = max_abs * std::sqrt((i + 0.5) / n);
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i));
  }
  double worst = 0.0;
  for (const auto& z : pts) {
    for (const auto& w : pts) {
      const std::complex<double> exact = std::pow(1.0 - std::conj(z.z()) * w.z(), -(2.0 + alpha));
      worst = std::max(worst, std::abs(kernel_eval(series, z, w) - exact) / std::abs(exact));
    }
  }
  return worst;
}

}  // namespace bergman
