#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bergman/expression.hpp"
#include "bergman/point.hpp"

namespace bergman {

// Radial density on [0,1). Every boundary-sensitive quantity is evaluated in
// the variable u = 1 - s so that tails near the unit circle keep full
// relative precision.
class RadialWeight {
 public:
  enum class Kind { StandardAlpha, Exponential, Custom };

  using DensityFn = std::function<double(double s, double u)>;

  // (1 + alpha)(1 - s^2)^alpha, alpha > -1.
  static RadialWeight standard_alpha(double alpha);
  // exp(-c / (1 - s)), c > 0.
  static RadialWeight exponential(double c);
  static RadialWeight custom(const std::string& expr);
  static RadialWeight custom(DensityFn density, std::string label);

  Kind kind() const { return kind_; }
  double alpha() const { return param_; }
  double c() const { return param_; }
  const std::string& label() const { return label_; }

  double density(double s) const { return density_(s, 1.0 - s); }
  double density_u(double u) const { return density_(1.0 - u, u); }
  // log of the density; finite even where the density underflows.
  double log_density_u(double u) const;

  // Tail integral of the density over [r, 1).
  double omega_hat(double r) const;
  double log_omega_hat(double r) const;
  // Quadrature route for the tail, used even when a closed form exists.
  double omega_hat_quadrature(double r) const;

  // Moment \int_0^1 s^x density(s) ds.
  double moment(double x) const;
  double moment_quadrature(double x) const;

  // \int_0^1 density.
  double total_mass() const { return omega_hat(0.0); }

  // Weighted area of the Carleson box S(a) for |a| = r, under normalized area.
  double square_mass(double r) const;
  // Weighted area of the tent T(zeta) for |zeta| = r.
  double tent_mass(double r) const;

  bool has_closed_form() const { return kind_ != Kind::Custom; }

 private:
  RadialWeight(Kind kind, double param, DensityFn density, std::string label);
  void check_integrable() const;

  Kind kind_;
  double param_ = 0.0;
  DensityFn density_;
  std::string label_;
};

// Log-tail values on the geometric radii 1 - 2^{-j/4}.
class TailTable {
 public:
  TailTable(const RadialWeight& weight, int levels);

  int levels() const { return levels_; }
  int size() const { return static_cast<int>(log_values_.size()); }
  double radius(int node) const;
  double log_value(int node) const { return log_values_.at(static_cast<std::size_t>(node)); }
  double value(int node) const;
  // Radius 1 - 2^{-m} sits at node 4m.
  double log_at_level(int m) const { return log_value(4 * m); }

  // Monotone evaluation between nodes: linear in log(tail) against
  // log(1 - r), extrapolated as a power law past the last node.
  double eval(double r) const;

 private:
  int levels_;
  std::vector<double> log_values_;
};

enum class Verdict { Member, NonMember, Inconclusive };
const char* to_string(Verdict v);

struct ClassProbe {
  int m_max = 20;
  double plateau_tol = 0.01;
  double growth_factor = 10.0;
  int window = 5;
  std::vector<int> check_ks = {2, 4, 8, 16};
};

struct ClassRow {
  int level = 0;
  double r = 0.0;
  double log_dhat_ratio = 0.0;  // log of tail(r) / tail((1+r)/2)
  std::vector<double> log_dcheck_ratio;  // per K in probe.check_ks
  double log_r_ratio = 0.0;  // log of density(r)(1-r) / tail(r)
};

struct WeightClassReport {
  Verdict in_dhat = Verdict::Inconclusive;
  double c_hat = 0.0;
  double beta_hat = 0.0;
  Verdict in_dcheck = Verdict::Inconclusive;
  int k_check = 0;
  double c_check = 0.0;
  Verdict in_r = Verdict::Inconclusive;
  double r_lower = 0.0;
  double r_upper = 0.0;
  std::vector<ClassRow> diagnostics;
  std::vector<std::string> notes;

  bool in_d() const { return in_dhat == Verdict::Member && in_dcheck == Verdict::Member; }
};

WeightClassReport classify_weight(const RadialWeight& weight, const ClassProbe& probe = {});

// Weighted area of the Carleson square S(a). Throws ZERO_POINT for a = 0.
double omega_square_mass(const RadialWeight& weight, DiskPoint a);

// ratio_m = \int_0^t ((1-t)/(1-s))^gamma w(s) ds / tail(t) at t = 1 - 2^{-m}.
std::vector<double> tail_growth_ratios(const RadialWeight& weight, double gamma, int m_max);

// \int_D w(z) / |1 - conj(zeta) z|^{gamma+1} dA(z) divided by
// tail(|zeta|) / (1 - |zeta|)^gamma.
double kernel_integral_ratio(const RadialWeight& weight, double gamma, double zeta_abs);

}  // namespace bergman
