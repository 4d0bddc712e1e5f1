#include "bergman/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bergman/error.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

double slope_of_logs(const std::vector<double>& v, int window) {
  const int n = static_cast<int>(v.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < window; ++i) {
    const double y = std::log(v[static_cast<std::size_t>(n - window + i)]);
    sx += i;
    sy += y;
    sxx += static_cast<double>(i) * i;
    sxy += i * y;
  }
  return (window * sxy - sx * sy) / (window * sxx - sx * sx);
}

Answer answer_from(Status s) {
  switch (s) {
    case Status::Converged: return Answer::Yes;
    case Status::Divergent: return Answer::No;
    case Status::Inconclusive: return Answer::Inconclusive;
  }
  return Answer::Inconclusive;
}

// omega(T(s)) memoized on exact radius.
class TentCache {
 public:
  explicit TentCache(const RadialWeight& w) : w_(w) {}
  double operator()(double s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    const double v = w_.tent_mass(s);
    cache_.emplace(s, v);
    return v;
  }

 private:
  const RadialWeight& w_;
  std::map<double, double> cache_;
};

// (1 / 2 pi) \int_0^{2 pi} (sum of arc values covering theta)^e dtheta.
template <class Arcs>
double angular_power_mean(const Arcs& arcs, double rho, double e) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  std::vector<std::pair<double, double>> events;
  for (const auto& a : arcs) {
    if (rho <= a.radius) continue;
    const double half = 0.5 * (1.0 - a.radius / rho);
    double lo = std::fmod(a.center - half, kTwoPi);
    if (lo < 0.0) lo += kTwoPi;
    double hi = lo + 2.0 * half;
    if (hi <= kTwoPi) {
      events.emplace_back(lo, a.value);
      events.emplace_back(hi, -a.value);
    } else {
      events.emplace_back(lo, a.value);
      events.emplace_back(kTwoPi, -a.value);
      events.emplace_back(0.0, a.value);
      events.emplace_back(hi - kTwoPi, -a.value);
    }
  }
  if (events.empty()) return 0.0;
  std::sort(events.begin(), events.end());
  CompensatedSum total;
  double level = 0.0;
  double prev = 0.0;
  for (const auto& [theta, delta] : events) {
    if (theta > prev && level > 0.0) total.add(std::pow(level, e) * (theta - prev));
    level += delta;
    if (std::abs(level) < 1e-300) level = 0.0;
    prev = theta;
  }
  return total.value() / kTwoPi;
}

// Between consecutive radii where an arc starts or two arc endpoints meet,
// the angular mean is affine in 1 / rho; Gauss-Legendre on each such piece,
// further split at the mesh ring edges, is exact up to the weight's own
// smoothness. Rings past the cap form the tail.
template <class Arcs>
IntegralResult atomic_bmu_norm(const RadialWeight& weight, const Arcs& arcs, double e, const DiskGrid& grid) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  constexpr int kTailRings = 48;
  std::vector<double> breaks;  // in u = 1 - rho
  for (const auto& a : arcs) breaks.push_back(1.0 - a.radius);
  // Endpoint c_i + s_i h_i(rho) meets c_j + s_j h_j(rho) modulo 2 pi, with
  // h(rho) = (1 - |w| / rho) / 2; linear in x = 1 / rho.
  constexpr std::size_t kPairLimit = 400;
  if (arcs.size() <= kPairLimit) {
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      for (std::size_t j = i + 1; j < arcs.size(); ++j) {
        for (int si : {-1, 1}) {
          for (int sj : {-1, 1}) {
            const double coef = 0.5 * (si * arcs[i].radius - sj * arcs[j].radius);
            if (coef == 0.0) continue;
            for (int k : {-1, 0, 1}) {
              const double rhs = arcs[i].center - arcs[j].center + kTwoPi * k - 0.5 * (sj - si);
              const double x = rhs / coef;
              if (!(x > 1.0)) continue;
              const double rho = 1.0 / x;
              if (rho > std::max(arcs[i].radius, arcs[j].radius)) breaks.push_back(1.0 - rho);
            }
          }
        }
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());

  const GaussRule& g = gauss_rule(20);
  auto piece = [&](double u_lo, double u_hi) {
    CompensatedSum sum;
    const double mid = 0.5 * (u_lo + u_hi);
    const double half = 0.5 * (u_hi - u_lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double u = mid + half * g.x[i];
      const double rho = 1.0 - u;
      const double m = angular_power_mean(arcs, rho, e);
      if (m != 0.0) sum.add(half * g.w[i] * m * 2.0 * rho * weight.density_u(u));
    }
    return sum.value();
  };
  // \int over u in [ub, ua], split at the interior breaks.
  auto band = [&](double ub, double ua) {
    CompensatedSum sum;
    double lo = ub;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), ub);
    for (; it != breaks.end() && *it < ua; ++it) {
      sum.add(piece(lo, *it));
      lo = *it;
    }
    sum.add(piece(lo, ua));
    return sum.value();
  };

  IntegralResult res;
  res.grid_level = grid.j_max();
  const double K = grid.K();
  CompensatedSum total;
  for (int j = 0; j < grid.j_max(); ++j) {
    const double v = band(std::pow(K, -(j + 1)), std::pow(K, -j));
    res.ring_increments.push_back(v);
    total.add(v);
  }
  res.value = total.value();
  CompensatedSum tail;
  for (int j = grid.j_max(); j < grid.j_max() + kTailRings; ++j) tail.add(band(std::pow(K, -(j + 1)), std::pow(K, -j)));
  res.tail = tail.value();
  res.status = Status::Converged;
  res.error_estimate = std::abs(res.ring_increments.back());
  return res;
}

}  // namespace

const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

void EmbeddingParams::validate() const {
  if (!(p > 0.0) || !(q > 0.0)) throw Error(ErrorCode::BadExponents, "p and q must be positive");
  if (!(r_hyp > 0.0 && r_hyp < 1.0)) throw Error(ErrorCode::ConfigInvalid, "r_hyp must lie in (0,1)");
  if (!(lattice_t > 0.0 && lattice_t <= 2.0)) throw Error(ErrorCode::ConfigInvalid, "lattice_t must lie in (0,2]");
  if (lattice_level < window + 1 || lattice_level > 24) {
    throw Error(ErrorCode::ConfigInvalid, "lattice_level must lie in [window+1, 24]");
  }
  if (cell_level < window + 2 || cell_level > lattice_level) {
    throw Error(ErrorCode::ConfigInvalid, "cell_level must lie in [window+2, lattice_level]");
  }
  if (grid.j_max < 8) throw Error(ErrorCode::ConfigInvalid, "grid j_max must be at least 8");
}

double EmbeddingParams::lattice_cap() const { return 1.0 - std::ldexp(1.0, -lattice_level); }

Statistic Statistic::from(std::string name, const IntegralResult& r) {
  Statistic s;
  s.name = std::move(name);
  s.value = r.value;
  s.tail = r.tail;
  s.error_estimate = r.error_estimate;
  s.status = r.status;
  s.exceeds_cap = r.exceeds_cap;
  s.grid_level = r.grid_level;
  s.ring_values = r.ring_increments;
  return s;
}

MaximalStat maximal_stat(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                         const CellPartition& partition) {
  const Lattice& lat = partition.lattice();
  const int rings = params.lattice_level;
  const double expo = params.q / params.p;
  const DiskGrid grid(params.grid);
  const auto ratios = parallel_map<double>(lat.size(), [&](std::size_t k) {
    const DiskPoint a = lat.centers[k];
    if (a.abs() < params.min_center_radius) return -1.0;
    const double m = mass(mu, PseudoDisk{a, params.r_hyp}, grid).value;
    if (m <= 0.0) return 0.0;
    return std::exp(std::log(m) - expo * std::log(weight.square_mass(a.abs())));
  }, 64);

  MaximalStat out;
  out.ring_max.assign(static_cast<std::size_t>(rings), 0.0);
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (ratios[k] < 0.0) continue;
    const int ring = std::min(PolarBuckets::ring_of(lat.centers[k].abs()), rings - 1);
    auto& slot = out.ring_max[static_cast<std::size_t>(ring)];
    if (ratios[k] > slot) slot = ratios[k];
    if (ratios[k] > out.sup) {
      out.sup = ratios[k];
      out.argmax = static_cast<int>(k);
    }
  }
  double run = 0.0;
  for (double v : out.ring_max) {
    run = std::max(run, v);
    out.running_sup.push_back(run);
  }
  const std::size_t n = out.running_sup.size();
  const double last = out.running_sup.back();
  const double before = out.running_sup[n - 1 - static_cast<std::size_t>(params.window)];
  if (last == 0.0 || (before > 0.0 && last <= (1.0 + params.sup_growth_tol) * before)) {
    out.verdict = Answer::Yes;
  } else {
    // Increments of the running sup: fast geometric decay means a finite
    // limit, increments decaying slower than 0.9 per ring mean growth.
    std::vector<double> steps;
    for (std::size_t i = n - static_cast<std::size_t>(params.window); i < n; ++i) {
      steps.push_back(out.running_sup[i] - out.running_sup[i - 1]);
    }
    const bool positive = std::all_of(steps.begin(), steps.end(), [](double v) { return v > 0.0; });
    if (positive) {
      const double slope = slope_of_logs(steps, params.window);
      if (slope >= std::log(0.9)) out.verdict = Answer::No;
      else if (slope <= std::log(0.8)) out.verdict = Answer::Yes;
    }
  }
  return out;
}

double bmu_value(const RadialWeight& weight, const Measure& mu, DiskPoint z, const DiskGrid& grid) {
  if (z.abs2() == 0.0) return 0.0;
  if (mu.is_atomic()) {
    CompensatedSum s;
    const Region cone = Cone{z};
    for (const auto& a : mu.atoms()) {
      if (a.z.abs2() == 0.0) continue;
      if (region_contains(cone, a.z)) s.add(a.mass / weight.tent_mass(a.z.abs()));
    }
    return s.value();
  }
  const auto inv_tent = Integrand::of_radius([&](double r, double) { return 1.0 / weight.tent_mass(r); });
  return integrate_measure(mu, inv_tent, Cone{z}, grid).total();
}

IntegralResult bmu_norm(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                        const DiskGrid& grid) {
  if (!(params.p > params.q)) throw Error(ErrorCode::BadExponents, "bmu_norm needs p > q");
  const double e = params.p / (params.p - params.q);

  if (mu.is_atomic()) {
    // At radius rho the atom w contributes on the arc |theta - arg w| <
    // (1 - |w| / rho) / 2, so the angular integral of B_mu^e is exact.
    struct Arc {
      double center;
      double radius;
      double value;
    };
    std::vector<Arc> atoms;
    for (const auto& a : mu.atoms()) {
      if (a.z.abs2() == 0.0) continue;
      atoms.push_back({a.z.arg(), a.z.abs(), a.mass / weight.tent_mass(a.z.abs())});
    }
    return atomic_bmu_norm(weight, atoms, e, grid);
  }

  const int inner_levels = mu.is_radial() ? grid.j_max() : std::min(grid.j_max(), 8);
  const DiskGrid inner = grid.with_levels(inner_levels);
  const double per_ring = static_cast<double>(grid.M()) * gauss_rule(grid.config().radial_order).x.size();
  if (mu.is_radial()) {
    const double cost = per_ring * grid.j_max() * per_ring * inner_levels;
    if (cost > static_cast<double>(params.nested_budget)) {
      throw Error(ErrorCode::NestedBudget, "radial B_mu needs " + std::to_string(cost) + " evaluations");
    }
    TentCache tent(weight);
    auto inv_tent = Integrand::of_radius([&](double r, double) { return 1.0 / tent(r); });
    auto f = Integrand::of_radius([&](double r, double) {
      if (r == 0.0) return 0.0;
      const double b = integrate_measure(mu, inv_tent, Cone{DiskPoint(r, 0.0)}, inner).total();
      return std::pow(b, e);
    });
    return integrate(f, &weight, WholeDisk{}, grid);
  }
  double outer_nodes = 0.0;
  for (int j = 0; j < grid.j_max(); ++j) outer_nodes += static_cast<double>(ring_cells(grid.K(), j)) * per_ring;
  double inner_nodes = 0.0;
  for (int j = 0; j < inner_levels; ++j) inner_nodes += static_cast<double>(ring_cells(grid.K(), j)) * per_ring;
  if (outer_nodes * inner_nodes > static_cast<double>(params.nested_budget)) {
    throw Error(ErrorCode::NestedBudget, "B_mu for a general density needs about " +
                                             std::to_string(outer_nodes * inner_nodes) + " evaluations");
  }
  auto f = Integrand::general([&](DiskPoint z) { return std::pow(bmu_value(weight, mu, z, inner), e); });
  return integrate(f, &weight, WholeDisk{}, grid);
}

IntegralResult order_bounded_stat(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                                  const DiskGrid& grid) {
  const double expo = params.q / params.p;
  auto F = Integrand::of_radius(
      [&](double r, double u) { return std::exp(-expo * (weight.log_omega_hat(r) + std::log(u))); });
  return integrate_measure(mu, F, WholeDisk{}, grid);
}

Answer order_bounded_answer(const IntegralResult& r, double p, double q) {
  switch (r.status) {
    case Status::Converged: return Answer::Yes;
    case Status::Divergent: return p <= q ? Answer::No : Answer::Inconclusive;
    case Status::Inconclusive: return Answer::Inconclusive;
  }
  return Answer::Inconclusive;
}

std::shared_ptr<const CellPartition> make_partition(const EmbeddingParams& params) {
  auto lat = std::make_shared<const Lattice>(generate_lattice(params.lattice_t, params.metric, params.lattice_cap()));
  return std::make_shared<const CellPartition>(lat);
}

CarlesonReport bounded_diagnose(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params) {
  params.validate();
  const WeightClassReport wclass = classify_weight(weight);
  if (wclass.in_dhat == Verdict::NonMember) {
    throw Error(ErrorCode::Unsupported, "weight " + weight.label() + " is not upper doubling");
  }
  const auto partition = make_partition(params);
  return bounded_diagnose(weight, mu, params, *partition, wclass);
}

CarlesonReport bounded_diagnose(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                                const CellPartition& partition, const WeightClassReport& wclass) {
  params.validate();
  if (wclass.in_dhat == Verdict::NonMember) {
    throw Error(ErrorCode::Unsupported, "weight " + weight.label() + " is not upper doubling");
  }
  const DiskGrid grid(params.grid);
  CarlesonReport rep;
  if (params.p <= params.q) {
    rep.regime = "p_le_q";
    rep.maximal = maximal_stat(weight, mu, params, partition);
    Statistic s;
    s.name = "maximal_stat";
    s.value = rep.maximal.sup;
    s.ring_values = rep.maximal.running_sup;
    s.grid_level = params.lattice_level;
    s.status = rep.maximal.verdict == Answer::Yes  ? Status::Converged
               : rep.maximal.verdict == Answer::No ? Status::Divergent
                                                   : Status::Inconclusive;
    std::ostringstream note;
    note << "sup over lattice centers with |a_k| >= " << params.min_center_radius;
    s.note = note.str();
    rep.statistics.push_back(s);
    rep.bounded = rep.maximal.verdict;
  } else {
    rep.regime = "p_gt_q";
    const IntegralResult b = bmu_norm(weight, mu, params, grid);
    rep.statistics.push_back(Statistic::from("bmu_norm", b));
    rep.bounded = answer_from(b.status);
  }
  if (mu.is_atomic()) {
    for (const auto& a : mu.atoms()) {
      if (a.z.abs2() == 0.0) {
        rep.notes.push_back("atom at the origin excluded from square- and tent-based statistics");
        break;
      }
    }
  }

  const IntegralResult ob = order_bounded_stat(weight, mu, params, grid);
  Statistic obs = Statistic::from("order_bounded_stat", ob);
  obs.heuristic = params.p > params.q;
  if (obs.heuristic) obs.note = "order-boundedness criterion proved for p <= q; p > q is heuristic";
  rep.statistics.push_back(obs);
  rep.order_bounded = order_bounded_answer(ob, params.p, params.q);

  if (wclass.in_dhat == Verdict::Inconclusive) {
    rep.notes.push_back("upper doubling of the weight not certified; bounded verdict withheld");
    rep.bounded = Answer::Inconclusive;
  }
  if (rep.order_bounded == Answer::Yes) {
    if (rep.bounded == Answer::No) {
      throw Error(ErrorCode::InvariantViolation, "order bounded but not bounded for " + mu.label());
    }
    if (rep.bounded == Answer::Inconclusive) {
      rep.bounded = Answer::Yes;
      rep.notes.push_back("bounded inferred from order boundedness");
    }
  }
  return rep;
}

}  // namespace bergman
