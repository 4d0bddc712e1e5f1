#include "bergman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "bergman/error.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule r;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    r.x.push_back(-a[i]);
    r.w.push_back(w[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(w[i]);
  }
  return r;
}

double checked(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NanIntegrand, "integrand returned a non-finite value");
  return v;
}

double weight_at(const RadialWeight* density, double u) { return density ? density->density_u(u) : 1.0; }

// 1 - r^2 at the i-th of M equal-area band edges between inner u_a and outer u_b.
double band_edge_u(double ua, double ub, int i, int M) {
  const double t = static_cast<double>(i) / M;
  const double one_minus_r2 = ua * (2.0 - ua) * (1.0 - t) + ub * (2.0 - ub) * t;
  const double r = std::sqrt(std::max(0.0, 1.0 - one_minus_r2));
  return one_minus_r2 / (1.0 + r);
}

// Radial integrand inside a Euclidean disk: \int F(s) s * chord(s) ds / pi,
// chord(s) the angular length of {|z| = s} inside the disk. Substitutions
// s = m - h cos(psi) absorb the square-root endpoints.
double disk_radial(const Integrand& f, const RadialWeight* density, const EuclideanDisk& d, int n) {
  const double c = d.center.abs();
  const double R = d.radius;
  const GaussRule& g = gauss_rule(n);
  auto F = [&](double s) {
    const double u = 1.0 - s;
    return checked(f.radial(s, u)) * weight_at(density, u);
  };
  auto chord = [&](double s) {
    if (c == 0.0 || s <= R - c) return kTwoPi;
    const double cosv = (s * s + c * c - R * R) / (2.0 * s * c);
    return 2.0 * std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  CompensatedSum sum;
  double lo = c - R;
  if (c < R) {
    // Full circles for s < R - c.
    const double a = R - c;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double s = 0.5 * a * (1.0 + g.x[i]);
      sum.add(0.5 * a * g.w[i] * F(s) * s * kTwoPi);
    }
    lo = R - c;
  }
  if (c > 0.0) {
    const double hi = c + R;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double psi = 0.5 * kPi * (1.0 + g.x[i]);
      const double s = mid - half * std::cos(psi);
      if (s <= 0.0) continue;
      sum.add(0.5 * kPi * g.w[i] * half * std::sin(psi) * F(s) * s * chord(s));
    }
  }
  return sum.value() / kPi;
}

double disk_general(const Integrand& f, const RadialWeight* density, const EuclideanDisk& d, int n) {
  const GaussRule& g = gauss_rule(n);
  const int nphi = 2 * n;
  CompensatedSum sum;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double rho = 0.5 * d.radius * (1.0 + g.x[i]);
    for (int k = 0; k < nphi; ++k) {
      const double phi = kTwoPi * (k + 0.5) / nphi;
      const DiskPoint z(d.center.re + rho * std::cos(phi), d.center.im + rho * std::sin(phi));
      sum.add(0.5 * d.radius * g.w[i] * rho * checked(f(z)) * weight_at(density, 1.0 - z.abs()));
    }
  }
  return sum.value() * (kTwoPi / nphi) / kPi;
}

IntegralResult integrate_disk(const Integrand& f, const RadialWeight* density, const EuclideanDisk& d) {
  IntegralResult res;
  const bool radial = f.is_radial();
  double prev = radial ? disk_radial(f, density, d, 8) : disk_general(f, density, d, 8);
  double cur = prev;
  for (int n : {16, 32}) {
    cur = radial ? disk_radial(f, density, d, n) : disk_general(f, density, d, n);
    if (std::abs(cur - prev) <= 1e-13 * std::abs(cur)) break;
    prev = cur;
  }
  res.value = cur;
  res.error_estimate = std::abs(cur - prev);
  res.status = Status::Converged;
  res.ring_increments = {cur};
  return res;
}

// Angular offset of [a, b] (relative to mid) folded to a signed interval.
struct AngularGap {
  double nearest;
  double farthest;
};

AngularGap angular_gap(double a, double b, double mid) {
  // Work with the interval centered as close to mid as possible.
  double ca = 0.5 * (a + b) - mid;
  ca = std::remainder(ca, kTwoPi);
  const double h = 0.5 * (b - a);
  const double lo = ca - h;
  const double hi = ca + h;
  AngularGap g;
  g.farthest = std::max(std::abs(lo), std::abs(hi));
  g.nearest = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  return g;
}

enum class Overlap { None, Partial, Full };

Overlap classify_cell(const PolarShape& shape, double ra, double rb, double ta, double tb) {
  if (rb <= shape.r_min || ra >= shape.r_max) return Overlap::None;
  if (shape.full_circle()) {
    return (ra >= shape.r_min && rb <= shape.r_max) ? Overlap::Full : Overlap::Partial;
  }
  const double ha = 0.5 * shape.width(std::max(ra, shape.r_min));
  const double hb = 0.5 * shape.width(std::min(rb, shape.r_max));
  const AngularGap g = angular_gap(ta, tb, shape.theta_mid);
  if (g.nearest >= std::max(ha, hb)) return Overlap::None;
  const bool radial_inside = ra >= shape.r_min && rb <= shape.r_max;
  if (radial_inside && g.farthest <= std::min(ha, hb)) return Overlap::Full;
  return Overlap::Partial;
}

// Radial integrand over a polar shape: one radial quadrature per ring.
double ring_radial(const Integrand& f, const RadialWeight* density, const PolarShape& shape, const DiskGrid& grid,
                   int j, double u_lo, double u_hi) {
  const auto& edges = grid.band_edges_u(j);
  const double ring_hi = edges.front();
  const double ring_lo = edges.back();
  const double a = std::max(ring_lo, u_lo);
  const double b = std::min(ring_hi, u_hi);
  if (!(b > a)) return 0.0;
  std::vector<double> bands;
  if (a == ring_lo && b == ring_hi) {
    bands.assign(edges.rbegin(), edges.rend());
  } else {
    const int M = grid.M();
    for (int i = 0; i <= M; ++i) bands.push_back(a + (b - a) * i / M);
  }
  const GaussRule& g = gauss_rule(grid.config().radial_order);
  CompensatedSum sum;
  for (std::size_t k = 0; k + 1 < bands.size(); ++k) {
    const double mid = 0.5 * (bands[k] + bands[k + 1]);
    const double half = 0.5 * (bands[k + 1] - bands[k]);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double u = mid + half * g.x[i];
      const double r = 1.0 - u;
      sum.add(half * g.w[i] * checked(f.radial(r, u)) * weight_at(density, u) * r * shape.width(r));
    }
  }
  return sum.value() / kPi;
}

// Polar rectangle fully inside the region: radial Gauss nodes at mid angle.
double full_cell(const Integrand& f, const RadialWeight* density, double ra, double rb, double ta, double tb,
                 int order) {
  const GaussRule& g = gauss_rule(order);
  const double theta = 0.5 * (ta + tb);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double mid = 0.5 * (ra + rb);
  const double half = 0.5 * (rb - ra);
  CompensatedSum sum;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double r = mid + half * g.x[i];
    sum.add(half * g.w[i] * checked(f(DiskPoint(r * c, r * s))) * weight_at(density, 1.0 - r) * r);
  }
  return sum.value() * (tb - ta);
}

// Recursive 2 x 2 refinement of a polar rectangle that straddles the region
// boundary.
double partial_cell(const Integrand& f, const RadialWeight* density, const PolarShape& shape, const Region& region,
                    double ra, double rb, double ta, double tb, int depth) {
  constexpr int kMaxDepth = 8;
  const Overlap ov = depth == 0 ? Overlap::Partial : classify_cell(shape, ra, rb, ta, tb);
  if (ov == Overlap::None) return 0.0;
  const double rc = std::sqrt(0.5 * (ra * ra + rb * rb));
  const double tc = 0.5 * (ta + tb);
  const double area = 0.5 * (rb * rb - ra * ra) * (tb - ta);
  if (ov == Overlap::Full) return full_cell(f, density, ra, rb, ta, tb, 2);
  if (depth == kMaxDepth) {
    const DiskPoint z = DiskPoint::polar(rc, tc);
    if (!region_contains(region, z)) return 0.0;
    return area * checked(f(z)) * weight_at(density, 1.0 - rc);
  }
  return partial_cell(f, density, shape, region, ra, rc, ta, tc, depth + 1) +
         partial_cell(f, density, shape, region, ra, rc, tc, tb, depth + 1) +
         partial_cell(f, density, shape, region, rc, rb, ta, tc, depth + 1) +
         partial_cell(f, density, shape, region, rc, rb, tc, tb, depth + 1);
}

double ring_general(const Integrand& f, const RadialWeight* density, const PolarShape& shape, const Region& region,
                    const DiskGrid& grid, int j) {
  const auto& edges = grid.band_edges_u(j);
  const int K = grid.K();
  const int M = grid.M();
  const std::int64_t cells = ring_cells(K, j);
  const double dtheta = kTwoPi / static_cast<double>(cells);
  const double dpiece = dtheta / M;
  const GaussRule& g = gauss_rule(grid.config().radial_order);
  const bool whole = std::holds_alternative<WholeDisk>(region);

  return ordered_sum(static_cast<std::size_t>(cells), [&](std::size_t l) {
    CompensatedSum cell_sum;
    for (int band = 0; band < M; ++band) {
      const double ua = edges[static_cast<std::size_t>(band)];
      const double ub = edges[static_cast<std::size_t>(band + 1)];
      const double ra = 1.0 - ua;
      const double rb = 1.0 - ub;
      for (int piece = 0; piece < M; ++piece) {
        const double ta = static_cast<double>(l) * dtheta + piece * dpiece;
        const double tb = ta + dpiece;
        const Overlap ov = whole ? Overlap::Full : classify_cell(shape, ra, rb, ta, tb);
        if (ov == Overlap::None) continue;
        if (ov == Overlap::Full) {
          const double theta = 0.5 * (ta + tb);
          const double c = std::cos(theta);
          const double s = std::sin(theta);
          const double mid = 0.5 * (ua + ub);
          const double half = 0.5 * (ua - ub);
          for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double u = mid + half * g.x[i];
            const double r = 1.0 - u;
            cell_sum.add(half * g.w[i] * checked(f(DiskPoint(r * c, r * s))) * weight_at(density, u) * r * dpiece);
          }
          continue;
        }
        cell_sum.add(partial_cell(f, density, shape, region, ra, rb, ta, tb, 0));
      }
    }
    return cell_sum.value() / kPi;
  }, 64);
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  GaussRule r;
  switch (order) {
    case 2: r = make_rule<2>(); break;
    case 3: r = make_rule<3>(); break;
    case 4: r = make_rule<4>(); break;
    case 5: r = make_rule<5>(); break;
    case 8: r = make_rule<8>(); break;
    case 10: r = make_rule<10>(); break;
    case 16: r = make_rule<16>(); break;
    case 20: r = make_rule<20>(); break;
    case 32: r = make_rule<32>(); break;
    default: throw std::invalid_argument("gauss_rule: unsupported order " + std::to_string(order));
  }
  return cache.emplace(order, std::move(r)).first->second;
}

double disk_rule(const Integrand& f, const RadialWeight* density, const EuclideanDisk& disk, int n) {
  return f.is_radial() ? disk_radial(f, density, disk, n) : disk_general(f, density, disk, n);
}

DiskGrid::DiskGrid(const GridConfig& cfg) : cfg_(cfg) {
  if (cfg.K < 2 || cfg.M < 1 || cfg.j_max < 1) throw std::invalid_argument("DiskGrid: need K >= 2, M >= 1, j_max >= 1");
  if (!(cfg.divergence_cap > 0.0)) throw std::invalid_argument("DiskGrid: divergence_cap must be positive");
  gauss_rule(cfg.radial_order);
  for (int j = 0; j < cfg.j_max; ++j) {
    const double ua = std::pow(static_cast<double>(cfg.K), -j);
    const double ub = ua / cfg.K;
    std::vector<double> e;
    for (int i = 0; i <= cfg.M; ++i) e.push_back(band_edge_u(ua, ub, i, cfg.M));
    e.front() = ua;
    e.back() = ub;
    edges_u_.push_back(std::move(e));
  }
}

std::vector<DiskGrid::Node> DiskGrid::nodes() const {
  std::vector<Node> out;
  for (const auto& c : dyadic_cells(cfg_.K, cfg_.M, cfg_.j_max - 1)) out.push_back({c.center, c.area});
  return out;
}

DiskGrid DiskGrid::with_levels(int j_max) const {
  GridConfig c = cfg_;
  c.j_max = j_max;
  return DiskGrid(c);
}

Integrand Integrand::constant(double c) {
  Integrand f;
  f.radial = [c](double, double) { return c; };
  return f;
}

Integrand Integrand::of_radius(std::function<double(double, double)> g) {
  Integrand f;
  f.radial = std::move(g);
  return f;
}

Integrand Integrand::general(std::function<double(DiskPoint)> g) {
  Integrand f;
  f.f = std::move(g);
  return f;
}

double Integrand::operator()(DiskPoint z) const {
  if (f) return f(z);
  const double r = z.abs();
  return radial(r, 1.0 - r);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::Divergent: return "divergent";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Status detect_divergence(const std::vector<double>& inc, const DivergenceRule& rule) {
  const int n = static_cast<int>(inc.size());
  for (double v : inc) {
    if (std::isinf(v)) return Status::Divergent;
    if (std::isnan(v)) return Status::Inconclusive;
  }
  if (n < rule.min_rings || n < rule.window) return Status::Inconclusive;
  const auto last = inc.end() - rule.window;
  if (std::all_of(last, inc.end(), [](double v) { return v == 0.0; })) return Status::Converged;
  CompensatedSum total;
  for (double v : inc) total.add(v);
  if (total.value() != 0.0 && std::abs(inc.back()) < rule.converged_ratio * std::abs(total.value())) {
    return Status::Converged;
  }
  const bool positive = std::all_of(last, inc.end(), [](double v) { return v > 0.0; });
  const bool negative = std::all_of(last, inc.end(), [](double v) { return v < 0.0; });
  if (!positive && !negative) return Status::Inconclusive;
  // Least-squares slope of log|increment| against ring index.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < rule.window; ++i) {
    const double x = i;
    const double y = std::log(std::abs(inc[static_cast<std::size_t>(n - rule.window + i)]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double w = rule.window;
  const double slope = (w * sxy - sx * sy) / (w * sxx - sx * sx);
  // Flat increments (harmonic tail) count as non-decreasing.
  if (slope < -1e-9) return Status::Converged;
  return positive ? Status::Divergent : Status::Inconclusive;
}

double geometric_tail(const std::vector<double>& inc) {
  if (inc.size() < 2) return 0.0;
  const double a = inc[inc.size() - 2];
  const double b = inc.back();
  if (a == 0.0 || b == 0.0) return 0.0;
  const double q = b / a;
  if (!(q > 0.0 && q < 1.0)) return 0.0;
  const double simple = b * q / (1.0 - q);
  if (inc.size() < 5) return simple;
  // Wynn epsilon over the last five partial sums removes two geometric
  // components; kept only when it stays close to the one-ratio estimate.
  const std::size_t n = inc.size();
  double partial[5];
  partial[4] = 0.0;
  for (int i = 3; i >= 0; --i) partial[i] = partial[i + 1] - inc[n - 4 + static_cast<std::size_t>(i)];
  std::vector<double> prev(5, 0.0);
  std::vector<double> cur(partial, partial + 5);
  for (int k = 1; k <= 4; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) return simple;
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = cur;
    cur = next;
  }
  const double tail = cur[0];
  if (!std::isfinite(tail) || std::abs(tail - simple) > 0.5 * std::abs(simple)) return simple;
  return tail;
}

IntegralResult integrate(const Integrand& f, const RadialWeight* density, const Region& region, const DiskGrid& grid) {
  if (!f.f && !f.radial) throw std::invalid_argument("integrate: empty integrand");
  validate_region(region);
  EuclideanDisk disk;
  if (region_euclidean_disk(region, disk)) {
    IntegralResult r = integrate_disk(f, density, disk);
    r.grid_level = grid.j_max();
    return r;
  }
  PolarShape shape;
  region_polar_shape(region, shape);
  const double u_lo = 1.0 - shape.r_max;
  const double u_hi = 1.0 - shape.r_min;

  IntegralResult res;
  res.grid_level = grid.j_max();
  CompensatedSum total;
  for (int j = 0; j < grid.j_max(); ++j) {
    const double v = f.is_radial() ? ring_radial(f, density, shape, grid, j, u_lo, u_hi)
                                   : ring_general(f, density, shape, region, grid, j);
    res.ring_increments.push_back(v);
    total.add(v);
  }
  res.value = total.value();
  DivergenceRule rule;
  rule.cap = grid.config().divergence_cap;
  res.status = detect_divergence(res.ring_increments, rule);
  res.exceeds_cap = std::abs(res.value) > rule.cap;
  res.error_estimate = std::abs(res.ring_increments.back());
  if (res.status == Status::Converged) res.tail = geometric_tail(res.ring_increments);
  return res;
}

}  // namespace bergman
