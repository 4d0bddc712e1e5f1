#include "bergman/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "bergman/error.hpp"

namespace bergman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// tanh-sinh over [a, b]; throws NON_INTEGRABLE when the rule cannot certify
// a finite value.
template <class F>
double integrate_1d(F f, double a, double b, const char* what) {
  if (b <= a) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = rule.integrate(f, a, b, 1e-13, &err, &l1);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::NonIntegrable, std::string(what) + ": " + e.what());
  }
  if (!std::isfinite(value) || !std::isfinite(err) || err > 1e-2 * std::max(l1, 1e-300)) {
    throw Error(ErrorCode::NonIntegrable, std::string(what) + " did not converge");
  }
  return value;
}

// log E_2(z) for z > 0, stable for large z (continued fraction with the
// exponential factor split off).
double log_expint2(double z) {
  if (z <= 1.0) return std::log(boost::math::expint(2, z));
  constexpr int n = 2;
  constexpr double tiny = 1e-300;
  double b = z + n;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::log(h) - z;
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_unit_interval(double r, const char* what) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument(std::string(what) + ": r must lie in [0,1)");
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NonMember: return "non_member";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

RadialWeight::RadialWeight(Kind kind, double param, DensityFn density, std::string label)
    : kind_(kind), param_(param), density_(std::move(density)), label_(std::move(label)) {}

RadialWeight RadialWeight::standard_alpha(double alpha) {
  if (!(alpha > -1.0)) throw std::invalid_argument("standard_alpha: alpha must exceed -1");
  auto density = [alpha](double s, double u) {
    if (alpha == 0.0) return 1.0;
    return (1.0 + alpha) * std::pow(u * (1.0 + s), alpha);
  };
  RadialWeight w(Kind::StandardAlpha, alpha, density, "standard_alpha(" + num(alpha) + ")");
  return w;
}

RadialWeight RadialWeight::exponential(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("exponential: c must be positive");
  auto density = [c](double, double u) { return u > 0.0 ? std::exp(-c / u) : 0.0; };
  return RadialWeight(Kind::Exponential, c, density, "exponential(" + num(c) + ")");
}

RadialWeight RadialWeight::custom(const std::string& expr) {
  Expression e(expr);
  RadialWeight w(Kind::Custom, 0.0, [e](double s, double u) { return e(s, u); }, expr);
  w.check_integrable();
  return w;
}

RadialWeight RadialWeight::custom(DensityFn density, std::string label) {
  RadialWeight w(Kind::Custom, 0.0, std::move(density), std::move(label));
  w.check_integrable();
  return w;
}

void RadialWeight::check_integrable() const {
  for (int i = 1; i < 64; ++i) {
    const double u = std::ldexp(1.0, -i / 2) * (i % 2 ? 0.75 : 1.0);
    const double v = density_u(std::min(u, 1.0 - 1e-12));
    if (!(v >= 0.0)) throw Error(ErrorCode::NonIntegrable, label_ + ": density negative or undefined");
  }
  const double mass = omega_hat_quadrature(0.0);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::NonIntegrable, label_ + ": total mass not finite and positive");
  }
}

double RadialWeight::log_density_u(double u) const {
  if (kind_ == Kind::Exponential) return -param_ / u;
  return std::log(density_u(u));
}

double RadialWeight::omega_hat_quadrature(double r) const {
  check_unit_interval(r, "omega_hat");
  return integrate_1d([this](double u) { return density_u(u); }, 0.0, 1.0 - r, "tail integral");
}

double RadialWeight::omega_hat(double r) const {
  check_unit_interval(r, "omega_hat");
  switch (kind_) {
    case Kind::StandardAlpha: {
      if (param_ == 0.0) return 1.0 - r;
      // (1+a)/2 B(1/2, a+1) I_y(a+1, 1/2) with y = 1 - r^2 computed without cancellation.
      const double y = (1.0 - r) * (1.0 + r);
      return 0.5 * (1.0 + param_) * boost::math::beta(0.5, param_ + 1.0) *
             boost::math::ibeta(param_ + 1.0, 0.5, y);
    }
    case Kind::Exponential: return std::exp(log_omega_hat(r));
    case Kind::Custom: return omega_hat_quadrature(r);
  }
  return 0.0;
}

double RadialWeight::log_omega_hat(double r) const {
  check_unit_interval(r, "omega_hat");
  if (kind_ == Kind::Exponential) {
    // tail(r) = (1 - r) E_2(c / (1 - r))
    const double u = 1.0 - r;
    return std::log(u) + log_expint2(param_ / u);
  }
  return std::log(omega_hat(r));
}

double RadialWeight::moment_quadrature(double x) const {
  if (!(x >= 0.0)) throw std::invalid_argument("moment: x must be nonnegative");
  auto f = [this, x](double u) {
    const double w = density_u(u);
    return w == 0.0 ? 0.0 : std::pow(1.0 - u, x) * w;
  };
  // The integrand concentrates in u < ~1/x for large x; split there.
  const double split = std::min(0.5, 20.0 / (x + 1.0));
  return integrate_1d(f, 0.0, split, "moment") + integrate_1d(f, split, 1.0, "moment");
}

double RadialWeight::moment(double x) const {
  if (!(x >= 0.0)) throw std::invalid_argument("moment: x must be nonnegative");
  if (kind_ == Kind::StandardAlpha) {
    return 0.5 * (1.0 + param_) * boost::math::beta((x + 1.0) / 2.0, param_ + 1.0);
  }
  return moment_quadrature(x);
}

double RadialWeight::square_mass(double r) const {
  check_unit_interval(r, "square_mass");
  const double d = 1.0 - r;
  if (kind_ == Kind::StandardAlpha) {
    // \int_r^1 s (1+a)(1-s^2)^a ds = (1-r^2)^{a+1} / 2
    return d / std::numbers::pi * 0.5 * std::pow(d * (1.0 + r), param_ + 1.0);
  }
  const double first = integrate_1d([this](double u) { return (1.0 - u) * density_u(u); }, 0.0, d,
                                    "square mass");
  return d / std::numbers::pi * first;
}

double RadialWeight::tent_mass(double r) const {
  check_unit_interval(r, "tent_mass");
  const double d = 1.0 - r;
  // T(zeta) at radius s has angular width 1 - |zeta|/s.
  const double v = integrate_1d([this, d](double u) { return (d - u) * density_u(u); }, 0.0, d, "tent mass");
  return v / std::numbers::pi;
}

double omega_square_mass(const RadialWeight& weight, DiskPoint a) {
  const double r = a.abs();
  if (r == 0.0) throw Error(ErrorCode::ZeroPoint, "Carleson square S(a) is undefined at a = 0");
  if (!(r < 1.0)) throw std::invalid_argument("omega_square_mass: point outside the disk");
  return weight.square_mass(r);
}

// ---------------------------------------------------------------------------

TailTable::TailTable(const RadialWeight& weight, int levels) : levels_(levels) {
  if (levels < 1) throw std::invalid_argument("TailTable: levels must be positive");
  const int nodes = 4 * levels + 1;
  log_values_.reserve(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) log_values_.push_back(weight.log_omega_hat(radius(j)));
  for (int j = 1; j < nodes; ++j) {
    if (log_values_[j] > log_values_[j - 1]) log_values_[j] = log_values_[j - 1];
  }
}

double TailTable::radius(int node) const { return -std::expm1(-std::numbers::ln2 * node / 4.0); }

double TailTable::value(int node) const { return std::exp(log_value(node)); }

double TailTable::eval(double r) const {
  check_unit_interval(r, "TailTable::eval");
  const double pos = -4.0 * std::log2(1.0 - r);
  const int last = size() - 1;
  int j = std::min(static_cast<int>(pos), last - 1);
  const double t = pos - j;
  const double a = log_values_[static_cast<std::size_t>(j)];
  const double b = log_values_[static_cast<std::size_t>(j + 1)];
  return std::exp(a + t * (b - a));
}

// ---------------------------------------------------------------------------

namespace {

// Running-sup plateau over the last `window` levels, in log space.
bool plateaus(const std::vector<double>& log_running_sup, int window, double tol) {
  const int n = static_cast<int>(log_running_sup.size());
  if (n <= window) return false;
  const double a = log_running_sup[static_cast<std::size_t>(n - 1 - window)];
  const double b = log_running_sup[static_cast<std::size_t>(n - 1)];
  return std::isfinite(b) && b - a < std::log1p(tol);
}

// Strictly monotone over the last window+1 entries with total change of at
// least `factor` (log space).
bool grows_monotonically(const std::vector<double>& logs, int window, double factor) {
  const int n = static_cast<int>(logs.size());
  if (n <= window) return false;
  for (int i = n - window; i < n; ++i) {
    if (!(logs[static_cast<std::size_t>(i)] > logs[static_cast<std::size_t>(i - 1)])) return false;
  }
  return logs[static_cast<std::size_t>(n - 1)] - logs[static_cast<std::size_t>(n - 1 - window)] >= std::log(factor);
}

}  // namespace

WeightClassReport classify_weight(const RadialWeight& weight, const ClassProbe& probe) {
  int max_shift = 1;
  for (int k : probe.check_ks) {
    if (k < 2 || (k & (k - 1)) != 0) throw std::invalid_argument("classify_weight: K must be a power of two");
    max_shift = std::max(max_shift, static_cast<int>(std::lround(std::log2(k))));
  }
  if (probe.m_max <= probe.window) {
    throw Error(ErrorCode::InsufficientResolution, "probe range shorter than the plateau window");
  }
  const TailTable table(weight, probe.m_max + max_shift);
  if (table.levels() < probe.m_max + max_shift) {
    throw Error(ErrorCode::InsufficientResolution, "tail table does not reach the probe range");
  }

  WeightClassReport rep;
  std::vector<double> log_dhat;
  std::vector<double> running;
  std::vector<std::vector<double>> log_check(probe.check_ks.size());
  std::vector<double> log_rr;
  for (int m = 0; m < probe.m_max; ++m) {
    ClassRow row;
    row.level = m;
    row.r = table.radius(4 * m);
    row.log_dhat_ratio = table.log_at_level(m) - table.log_at_level(m + 1);
    for (std::size_t i = 0; i < probe.check_ks.size(); ++i) {
      const int shift = static_cast<int>(std::lround(std::log2(probe.check_ks[i])));
      const double v = table.log_at_level(m) - table.log_at_level(m + shift);
      row.log_dcheck_ratio.push_back(v);
      log_check[i].push_back(v);
    }
    const double u = std::ldexp(1.0, -m);
    row.log_r_ratio = weight.log_density_u(u) + std::log(u) - table.log_at_level(m);
    log_dhat.push_back(row.log_dhat_ratio);
    running.push_back(running.empty() ? row.log_dhat_ratio : std::max(running.back(), row.log_dhat_ratio));
    log_rr.push_back(row.log_r_ratio);
    rep.diagnostics.push_back(std::move(row));
  }

  // Upper doubling.
  if (plateaus(running, probe.window, probe.plateau_tol)) {
    rep.in_dhat = Verdict::Member;
    rep.c_hat = std::exp(running.back());
    rep.beta_hat = std::log2(rep.c_hat);
  } else if (grows_monotonically(log_dhat, probe.window, probe.growth_factor)) {
    rep.in_dhat = Verdict::NonMember;
    rep.c_hat = std::isfinite(std::exp(running.back())) ? std::exp(running.back()) : kInf;
  } else {
    rep.c_hat = std::exp(running.back());
  }

  // Lower doubling: first K whose ratio stays above 1 on every probe radius.
  bool all_flatten = true;
  for (std::size_t i = 0; i < probe.check_ks.size(); ++i) {
    const double log_min = *std::min_element(log_check[i].begin(), log_check[i].end());
    if (rep.in_dcheck != Verdict::Member && log_min > 1e-9) {
      rep.in_dcheck = Verdict::Member;
      rep.k_check = probe.check_ks[i];
      rep.c_check = std::exp(log_min);
    }
    // Non-membership witness: ratio - 1 shrinking by the growth factor.
    std::vector<double> neg_log_excess;
    for (double v : log_check[i]) neg_log_excess.push_back(-std::log(std::expm1(std::max(v, 1e-300))));
    if (!grows_monotonically(neg_log_excess, probe.window, probe.growth_factor)) all_flatten = false;
  }
  if (rep.in_dcheck != Verdict::Member && all_flatten) rep.in_dcheck = Verdict::NonMember;

  // Corrected class R: density(r)(1-r) comparable to tail(r).
  std::vector<double> run_max;
  std::vector<double> run_min_neg;
  for (double v : log_rr) {
    run_max.push_back(run_max.empty() ? v : std::max(run_max.back(), v));
    run_min_neg.push_back(run_min_neg.empty() ? -v : std::max(run_min_neg.back(), -v));
  }
  std::vector<double> neg_rr;
  for (double v : log_rr) neg_rr.push_back(-v);
  const bool finite_rr = std::all_of(log_rr.begin(), log_rr.end(), [](double v) { return std::isfinite(v); });
  if (finite_rr && plateaus(run_max, probe.window, probe.plateau_tol) &&
      plateaus(run_min_neg, probe.window, probe.plateau_tol)) {
    rep.in_r = Verdict::Member;
    rep.r_upper = std::exp(run_max.back());
    rep.r_lower = std::exp(-run_min_neg.back());
  } else if (grows_monotonically(log_rr, probe.window, probe.growth_factor) ||
             grows_monotonically(neg_rr, probe.window, probe.growth_factor)) {
    rep.in_r = Verdict::NonMember;
  }
  rep.notes.push_back("class R tested in the corrected form density(r)(1-r) ~ tail(r)");
  return rep;
}

std::vector<double> tail_growth_ratios(const RadialWeight& weight, double gamma, int m_max) {
  std::vector<double> out;
  for (int m = 0; m < m_max; ++m) {
    const double d = std::ldexp(1.0, -m);  // 1 - t
    // \int_0^t ((1-t)/(1-s))^gamma w(s) ds, in u = 1 - s over [d, 1].
    const double num = integrate_1d(
        [&](double u) {
          const double w = weight.density_u(u);
          return w == 0.0 ? 0.0 : std::pow(d / u, gamma) * w;
        },
        d, 1.0, "tail growth integral");
    out.push_back(num / weight.omega_hat(1.0 - d));
  }
  return out;
}

double kernel_integral_ratio(const RadialWeight& weight, double gamma, double zeta_abs) {
  if (!(zeta_abs >= 0.0 && zeta_abs < 1.0)) throw std::invalid_argument("kernel_integral_ratio: |zeta| in [0,1)");
  const double lambda = 0.5 * (gamma + 1.0);
  // Angular mean of |1 - x e^{it}|^{-2 lambda} is 2F1(lambda, lambda; 1; x^2).
  auto angular_mean = [lambda](double x) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < 200000; ++n) {
      const double k = n;
      term *= (lambda + k) * (lambda + k) / ((k + 1.0) * (k + 1.0)) * x2;
      sum += term;
      if (term < 1e-17 * sum && k > 2.0 * lambda) break;
    }
    return sum;
  };
  const double integral = integrate_1d(
      [&](double u) {
        const double w = weight.density_u(u);
        if (w == 0.0) return 0.0;
        const double s = 1.0 - u;
        return 2.0 * s * w * angular_mean(zeta_abs * s);
      },
      0.0, 1.0, "kernel integral");
  const double d = 1.0 - zeta_abs;
  return integral / (weight.omega_hat(zeta_abs) / std::pow(d, gamma));
}

}  // namespace bergman
