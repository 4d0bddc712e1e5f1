#pragma once

#include <cmath>
#include <complex>

namespace bergman {

// Point of the open unit disk.
struct DiskPoint {
  double re = 0.0;
  double im = 0.0;

  constexpr DiskPoint() = default;
  constexpr DiskPoint(double re_, double im_) : re(re_), im(im_) {}
  explicit DiskPoint(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  std::complex<double> z() const { return {re, im}; }
  double abs() const { return std::hypot(re, im); }
  double abs2() const { return re * re + im * im; }
  // 1 - |z|^2 with one rounding per term; keeps relative precision near the circle.
  double one_minus_abs2() const { return std::fma(-im, im, std::fma(-re, re, 1.0)); }
  double arg() const { return std::atan2(im, re); }
  bool in_disk() const { return abs2() < 1.0; }

  static DiskPoint polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

  friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

}  // namespace bergman
