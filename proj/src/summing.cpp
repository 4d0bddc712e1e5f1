#include "bergman/summing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "bergman/error.hpp"
#include "bergman/kernels.hpp"
#include "bergman/parallel.hpp"
#include "bergman/rng.hpp"

namespace bergman {

namespace {

std::string short_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// 1/r' for r >= 1; 0 encodes r' = infinity.
double inv_conjugate(double r) { return 1.0 - 1.0 / r; }

Status status_from(Answer a) {
  switch (a) {
    case Answer::Yes: return Status::Converged;
    case Answer::No: return Status::Divergent;
    case Answer::Inconclusive: return Status::Inconclusive;
  }
  return Status::Inconclusive;
}

SummingVerdict verdict_from(Status s) {
  switch (s) {
    case Status::Converged: return SummingVerdict::Summing;
    case Status::Divergent: return SummingVerdict::NotSumming;
    case Status::Inconclusive: return SummingVerdict::Inconclusive;
  }
  return SummingVerdict::Inconclusive;
}

// sup_{||a||_{r'} <= 1} ||a||_p over R^n.
double canonical_denominator(int n, double p, double r) {
  const double expo = 1.0 / p - inv_conjugate(r);
  return expo > 0.0 ? std::pow(static_cast<double>(n), expo) : 1.0;
}

double combo_norm(const std::vector<std::vector<double>>& x, const std::vector<double>& a, double p) {
  std::vector<double> y(x.front().size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (a[k] == 0.0) continue;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a[k] * x[k][i];
  }
  return lp_norm(y, p);
}

// Projected coordinate ascent for sup_{||a||_{r'} <= 1} ||sum_k a_k x_k||_p.
// Returns an attained value, hence a lower estimate of the sup.
double ascent_denominator(const std::vector<std::vector<double>>& x, double p, double r, std::size_t start) {
  const std::size_t n = x.size();
  const double ic = inv_conjugate(r);
  if (ic == 0.0) {
    // r' = infinity: the sup sits on a sign vertex.
    std::vector<double> a(n, 1.0);
    double best = combo_norm(x, a, p);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = -a[k];
        const double v = combo_norm(x, a, p);
        if (v > best * (1.0 + 1e-15)) {
          best = v;
          improved = true;
        } else {
          a[k] = -a[k];
        }
      }
    }
    return best;
  }
  const double rc = 1.0 / ic;
  std::vector<double> a(n, 0.0);
  a[start] = 1.0;
  double best = combo_norm(x, a, p);
  double step = 0.5;
  for (int sweep = 0; sweep < 60; ++sweep, step *= 0.85) {
    for (std::size_t k = 0; k < n; ++k) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> trial = a;
        trial[k] += sgn * step;
        const double norm = lp_norm(trial, rc);
        if (!(norm > 0.0)) continue;
        for (double& v : trial) v /= norm;
        const double val = combo_norm(x, trial, p);
        if (val > best) {
          best = val;
          a = std::move(trial);
        }
      }
    }
  }
  return best;
}

struct LowerBoundProbe {
  double numerator = 0.0;
  double upper = 0.0;
  double ascent = 0.0;
};

LowerBoundProbe probe_family(const MultiplierSeq& beta, const std::vector<std::vector<double>>& x, double p,
                             double r) {
  LowerBoundProbe out;
  std::vector<double> image_norms;
  std::vector<double> norms;
  std::size_t start = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::vector<double> y(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) y[i] = beta[i] * x[k][i];
    image_norms.push_back(lp_norm(y, p));
    norms.push_back(lp_norm(x[k], p));
    if (norms.back() > norms[start]) start = k;
  }
  out.numerator = lp_norm(image_norms, r);
  // Hoelder: ||sum a_k x_k||_p <= ||a||_{r'} ||(||x_k||_p)_k||_r.
  out.upper = lp_norm(norms, r);
  out.ascent = ascent_denominator(x, p, r, start);
  return out;
}

thread_local boost::math::quadrature::tanh_sinh<double> moment_rule(15);

double radial_moment(const Measure& mu, int j) {
  if (const auto s = mu.power()) return mu.scale() * boost::math::beta(j + 1.0, *s + 1.0);
  // x = r^2: \int_0^1 x^j g(sqrt x) dx.
  auto f = [&](double x) {
    if (x <= 0.0) return j == 0 ? mu.radial_density(0.0, 1.0) : 0.0;
    const double r = std::sqrt(x);
    const double u = (1.0 - x) / (1.0 + r);
    if (u <= 0.0) return 0.0;
    return std::pow(x, j) * mu.radial_density(r, u);
  };
  const double split = j > 0 ? 1.0 - 1.0 / (j + 1.0) : 0.5;
  return moment_rule.integrate(f, 0.0, split, 1e-12) + moment_rule.integrate(f, split, 1.0, 1e-12);
}

// Per-cell term mu(D_k) / (tail(|a_k|)(1 - |a_k|)) in log form.
double log_cell_ratio(const RadialWeight& weight, double mass, double a) {
  return std::log(mass) - weight.log_omega_hat(a) - std::log1p(-a);
}

}  // namespace

double lp_norm(const std::vector<double>& v, double s) {
  double big = 0.0;
  for (double x : v) big = std::max(big, std::abs(x));
  if (big == 0.0) return 0.0;
  CompensatedSum acc;
  for (double x : v) acc.add(std::pow(std::abs(x) / big, s));
  return big * std::pow(acc.value(), 1.0 / s);
}

MultiplierPi multiplier_pi_r(const MultiplierSeq& beta, double p, double r) {
  if (!(p > 1.0) || !(r >= 1.0)) throw Error(ErrorCode::BadExponents, "multiplier_pi_r needs p > 1 and r >= 1");
  MultiplierPi out;
  const double pc = p / (p - 1.0);
  if (p < 2.0) {
    out.value = lp_norm(beta, 2.0);
    out.regime = "p_le_2";
  } else if (r < pc) {
    out.value = lp_norm(beta, pc);
    out.regime = "r_le_pprime";
  } else if (r <= p) {
    out.value = lp_norm(beta, r);
    out.regime = "exact";
    out.exact = true;
  } else {
    out.value = lp_norm(beta, p);
    out.regime = "r_ge_p";
  }
  return out;
}

PiLowerBound empirical_pi_lower_detail(const MultiplierSeq& beta, double p, double r, const VectorFamily& family) {
  if (!(p >= 1.0) || !(r >= 1.0)) throw Error(ErrorCode::BadExponents, "empirical_pi_lower needs p, r >= 1");
  PiLowerBound out;
  if (const auto* c = std::get_if<CanonicalBasis>(&family)) {
    if (c->n < 1 || static_cast<std::size_t>(c->n) > beta.size()) {
      throw std::invalid_argument("empirical_pi_lower: canonical n must lie in [1, length(beta)]");
    }
    // Every prefix e_1..e_m is itself a test family; the best one keeps the
    // bound non-decreasing in n when the denominator grows (p < r').
    for (int m = 1; m <= c->n; ++m) {
      const std::vector<double> head(beta.begin(), beta.begin() + m);
      out.value = std::max(out.value, lp_norm(head, r) / canonical_denominator(m, p, r));
    }
    out.ascent_estimate = out.value;
    return out;
  }
  const auto& rs = std::get<RandomSearch>(family);
  if (rs.n < 1 || rs.iters < 1) throw std::invalid_argument("empirical_pi_lower: n and iters must be positive");
  if (beta.empty()) return out;
  const std::size_t d = beta.size();
  const int n0 = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(rs.n), d));
  out = empirical_pi_lower_detail(beta, p, r, CanonicalBasis{n0});
  for (int it = 1; it < rs.iters; ++it) {
    std::vector<std::vector<double>> x(static_cast<std::size_t>(rs.n), std::vector<double>(d));
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        const std::uint64_t idx = (static_cast<std::uint64_t>(it) * x.size() + k) * d + i;
        x[k][i] = 2.0 * counter_uniform(rs.seed, idx) - 1.0;
      }
    }
    const LowerBoundProbe pr = probe_family(beta, x, p, r);
    if (pr.upper > 0.0) out.value = std::max(out.value, pr.numerator / pr.upper);
    if (pr.ascent > 0.0) out.ascent_estimate = std::max(out.ascent_estimate, pr.numerator / pr.ascent);
  }
  return out;
}

double empirical_pi_lower(const MultiplierSeq& beta, double p, double r, const VectorFamily& family) {
  return empirical_pi_lower_detail(beta, p, r, family).value;
}

PietschResult pietsch_inf(const std::vector<double>& h, const std::vector<double>& masses, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::BadExponents, "pietsch_inf needs sigma > 0");
  if (h.size() != masses.size() || h.empty()) throw std::invalid_argument("pietsch_inf: h and masses must match");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] >= 0.0) || !(masses[i] > 0.0)) {
      throw std::invalid_argument("pietsch_inf: h must be nonnegative and masses positive");
    }
  }
  PietschResult out;
  const double theta = sigma / (sigma + 1.0);
  CompensatedSum cf;
  for (std::size_t i = 0; i < h.size(); ++i) cf.add(std::pow(h[i], theta) * masses[i]);
  if (cf.value() == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.closed_form = std::pow(cf.value(), 1.0 / theta);

  // Damped multiplicative updates F_i <- F_i^{1-eta} (h_i^{1/(sigma+1)})^eta
  // in log form, renormalized onto sum F_i^sigma m_i = 1. Atoms with h_i = 0
  // take F_i = 0.
  const double eta = 0.5;
  std::vector<double> g(h.size(), 0.0);
  auto normalize = [&] {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] > 0.0) top = std::max(top, sigma * g[i]);
    }
    CompensatedSum s;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] > 0.0) s.add(std::exp(sigma * g[i] - top) * masses[i]);
    }
    const double shift = (top + std::log(s.value())) / sigma;
    for (double& v : g) v -= shift;
  };
  auto objective = [&] {
    CompensatedSum s;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] > 0.0) s.add(std::exp(std::log(h[i]) - g[i]) * masses[i]);
    }
    return s.value();
  };
  normalize();
  double prev = objective();
  for (int it = 1; it <= 200; ++it) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] > 0.0) g[i] = (1.0 - eta) * g[i] + eta * std::log(h[i]) / (sigma + 1.0);
    }
    normalize();
    const double val = objective();
    out.iterations = it;
    if (std::abs(prev - val) <= 1e-15 * val) {
      prev = val;
      break;
    }
    prev = val;
  }
  out.optimizer_value = prev;
  return out;
}

double measure_moment(const Measure& mu, int j, const DiskGrid& grid) {
  if (mu.is_atomic()) {
    CompensatedSum s;
    for (const auto& a : mu.atoms()) s.add(a.mass * std::pow(a.z.abs2(), j));
    return s.value();
  }
  if (mu.is_radial()) return radial_moment(mu, j);
  const auto F = Integrand::of_radius([j](double r, double) { return std::pow(r * r, j); });
  return integrate_measure(mu, F, WholeDisk{}, grid).total();
}

HsResult hs_norm(const RadialWeight& weight, const Measure& mu, int N, const DiskGrid& grid) {
  if (N < 1) throw std::invalid_argument("hs_norm: N must be positive");
  const KernelSeries series(weight, N);
  const auto& c = series.coeffs();
  const auto terms = parallel_map<double>(
      static_cast<std::size_t>(N) + 1, [&](std::size_t j) { return c[j] * measure_moment(mu, static_cast<int>(j), grid); },
      8);
  HsResult out;
  CompensatedSum total;
  for (double t : terms) total.add(t);
  out.truncated_sum = total.value();
  for (std::size_t lo = 0;; lo = 2 * lo + 1) {
    const std::size_t hi = 2 * lo + 1;
    if (hi > terms.size()) break;
    CompensatedSum b;
    for (std::size_t j = lo; j < hi; ++j) b.add(terms[j]);
    out.block_sums.push_back(b.value());
  }
  DivergenceRule rule;
  rule.cap = grid.config().divergence_cap;
  out.series_status = detect_divergence(out.block_sums, rule);

  const auto F = Integrand::of_radius(
      [&](double r, double u) { return std::exp(-(weight.log_omega_hat(r) + std::log(u))); });
  out.comparator_detail = integrate_measure(mu, F, WholeDisk{}, grid);
  out.comparator = out.comparator_detail.total();
  out.comparator_status = out.comparator_detail.status;
  out.ratio = out.comparator > 0.0 ? out.truncated_sum / out.comparator : 0.0;
  if (out.series_status == out.comparator_status) {
    out.status = out.series_status;
  } else {
    out.status = Status::Inconclusive;
    out.note = std::string("series ") + to_string(out.series_status) + " but comparator " +
               to_string(out.comparator_status);
  }
  return out;
}

CellSum cell_sum_stat(const RadialWeight& weight, const CellPartition& partition, const CellMassTable& table, int level,
                      double e, bool atomic) {
  if (!(e > 0.0)) throw std::invalid_argument("cell_sum_stat: exponent must be positive");
  const Lattice& lat = partition.lattice();
  if (table.masses.size() != lat.size()) throw std::invalid_argument("cell_sum_stat: table does not match partition");
  const bool shares = !table.ring_shares.empty();
  if (!atomic && !shares) throw std::invalid_argument("cell_sum_stat: density measures need ring shares");
  CellSum out;
  // Cells centred in ring level-1 reach past the cap and are dropped; they
  // also feed ring level-2, so only rings below level-2 are complete.
  const int kept = level - 1;
  const int rings = atomic ? 0 : level - 2;
  std::vector<CompensatedSum> per_ring(static_cast<std::size_t>(std::max(rings, 0)));
  CompensatedSum total;
  double best = -1.0;
  for (std::size_t k = 0; k < lat.size(); ++k) {
    const double m = table.masses[k];
    const double a = lat.centers[k].abs();
    const int ring = PolarBuckets::ring_of(a);
    if (!atomic && ring >= kept) continue;
    ++out.cells;
    if (!(m > 0.0)) continue;
    const double term = std::exp(e * log_cell_ratio(weight, m, a));
    total.add(term);
    if (term > best) {
      best = term;
      out.argmax = static_cast<int>(k);
    }
    if (atomic) {
      if (static_cast<std::size_t>(ring) >= per_ring.size()) per_ring.resize(static_cast<std::size_t>(ring) + 1);
      per_ring[static_cast<std::size_t>(ring)].add(term);
      continue;
    }
    // Apportion the term over mesh rings by the cell's mass in each.
    for (const auto& [j, share] : table.ring_shares[k]) {
      if (j < rings) per_ring[static_cast<std::size_t>(j)].add(term * share / m);
    }
  }
  for (const auto& s : per_ring) out.ring_values.push_back(s.value());
  out.value = total.value();
  out.rings = static_cast<int>(out.ring_values.size());
  if (atomic) {
    out.status = Status::Converged;
  } else {
    out.status = detect_divergence(out.ring_values);
    if (out.status == Status::Converged) out.tail = geometric_tail(out.ring_values);
  }
  return out;
}

CellSum cell_sum_stat(const RadialWeight& weight, const Measure& mu, const CellPartition& partition,
                      const EmbeddingParams& params, double e) {
  GridConfig cfg = params.grid;
  cfg.K = 2;
  cfg.j_max = params.cell_level;
  CellMassOptions opts;
  opts.ring_shares = true;
  const CellMassTable table = cell_masses(mu, partition, DiskGrid(cfg), opts);
  return cell_sum_stat(weight, partition, table, params.cell_level, e, mu.is_atomic());
}

const char* to_string(TwoSummingPreset p) { return p == TwoSummingPreset::A ? "A" : "B"; }

IntegralResult two_summing_stat(const RadialWeight& weight, const Measure& mu, double p, TwoSummingPreset preset,
                                const EmbeddingParams& params, const DiskGrid& grid) {
  if (!(p > 1.0)) throw Error(ErrorCode::BadExponents, "two_summing_stat needs p > 1");
  const double pc = p / (p - 1.0);
  const double a = pc / 2.0;
  const double b = preset == TwoSummingPreset::A ? pc / p : 2.0 / p;
  const double rh = params.r_hyp;
  auto log_h = [&](double r, double u) { return -b * (weight.log_omega_hat(r) + std::log(u)); };

  if (mu.is_atomic()) {
    std::vector<Measure::Atom> atoms = mu.atoms();
    const double sep = 2.0 * rh / (1.0 + rh * rh);
    bool disjoint = true;
    for (std::size_t i = 0; i < atoms.size() && disjoint; ++i) {
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        if (rho(atoms[i].z, atoms[j].z) < sep) {
          disjoint = false;
          break;
        }
      }
    }
    if (disjoint) {
      // The integrand is m_i^a h on Delta(w_i, r_hyp) and zero elsewhere.
      const auto h = Integrand::of_radius([&](double r, double u) { return std::exp(log_h(r, u)); });
      IntegralResult out;
      CompensatedSum s;
      for (const auto& at : atoms) {
        s.add(std::pow(at.mass, a) * disk_rule(h, &weight, pseudo_disk_euclidean(at.z, rh), 32));
      }
      out.value = s.value();
      out.status = Status::Converged;
      out.grid_level = grid.j_max();
      return out;
    }
    double reach = 0.0;
    for (const auto& at : atoms) {
      const EuclideanDisk d = pseudo_disk_euclidean(at.z, rh);
      reach = std::max(reach, d.center.abs() + d.radius);
    }
    int levels = 8;
    while (levels < grid.j_max() && dyadic_radius(grid.K(), levels - 1) < reach) ++levels;
    const DiskGrid g = grid.with_levels(levels);
    const Measure& m = mu;
    auto F = Integrand::general([&](DiskPoint xi) {
      double s = 0.0;
      for (const auto& at : m.atoms()) {
        if (rho(xi, at.z) < rh) s += at.mass;
      }
      return s > 0.0 ? std::exp(a * std::log(s) + log_h(xi.abs(), 1.0 - xi.abs())) : 0.0;
    });
    return integrate(F, &weight, WholeDisk{}, g);
  }

  if (mu.is_radial()) {
    auto F = Integrand::of_radius([&](double r, double u) {
      const double m = mass(mu, PseudoDisk{DiskPoint(r, 0.0), rh}, grid).total();
      return m > 0.0 ? std::exp(a * std::log(m) + log_h(r, u)) : 0.0;
    });
    return integrate(F, &weight, WholeDisk{}, grid);
  }

  const int levels = std::min(grid.j_max(), 8);
  const DiskGrid g = grid.with_levels(levels);
  const double per_ring = static_cast<double>(g.M()) * g.M() * gauss_rule(g.config().radial_order).x.size();
  double nodes = 0.0;
  for (int j = 0; j < levels; ++j) nodes += static_cast<double>(ring_cells(g.K(), j)) * per_ring;
  // Each pseudo-disk mass costs up to 32 x 64 density evaluations.
  if (nodes * 2048.0 > static_cast<double>(params.nested_budget)) {
    throw Error(ErrorCode::NestedBudget,
                "2-summing statistic for a general density needs about " + std::to_string(nodes * 2048.0) +
                    " evaluations");
  }
  auto F = Integrand::general([&](DiskPoint xi) {
    const double m = mass(mu, PseudoDisk{xi, rh}, g).total();
    return m > 0.0 ? std::exp(a * std::log(m) + log_h(xi.abs(), 1.0 - xi.abs())) : 0.0;
  });
  return integrate(F, &weight, WholeDisk{}, g);
}

const char* to_string(SummingVerdict v) {
  switch (v) {
    case SummingVerdict::Summing: return "summing";
    case SummingVerdict::NotSumming: return "not_summing";
    case SummingVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool chain_holds(const CarlesonReport& carleson, const SummingReport& summing, double p, double r) {
  if (carleson.order_bounded == Answer::Yes && carleson.bounded == Answer::No) return false;
  if (carleson.order_bounded == Answer::Yes && r >= p && summing.verdict == SummingVerdict::NotSumming) return false;
  if (summing.verdict == SummingVerdict::Summing && carleson.bounded == Answer::No) return false;
  return true;
}

void reconcile(CarlesonReport& carleson, SummingReport& summing, double p, double r) {
  if (!chain_holds(carleson, summing, p, r)) {
    throw Error(ErrorCode::InvariantViolation,
                std::string("verdict chain broken: order_bounded=") + to_string(carleson.order_bounded) +
                    " summing=" + to_string(summing.verdict) + " bounded=" + to_string(carleson.bounded));
  }
  if (summing.verdict == SummingVerdict::Summing && carleson.bounded == Answer::Inconclusive) {
    carleson.bounded = Answer::Yes;
    carleson.notes.push_back("bounded inferred from the summing verdict");
  }
  if (carleson.order_bounded == Answer::Yes && r >= p && summing.verdict == SummingVerdict::Inconclusive) {
    summing.notes.push_back("order bounded, so summing for r >= p; criterion itself undecided");
  }
}

SummingReport classify_summing(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                               const CellPartition& partition, const WeightClassReport& wclass,
                               const CarlesonReport& carleson) {
  const double p = params.p;
  const double q = params.q;
  const double r = params.r;
  if (!(p > 1.0) || !(q > 0.0) || !(r >= 1.0)) {
    throw Error(ErrorCode::BadExponents, "summing diagnostics need p > 1, q > 0, r >= 1");
  }
  const double pc = p / (p - 1.0);
  const DiskGrid grid(params.grid);
  SummingReport rep;

  // Exponent e and outer power of the lower-bound cell sum.
  double lb_e = 0.0;
  double lb_power = 0.0;
  if (p < 2.0 && q > 1.0 && q <= 2.0) {
    rep.regime = "p_in_1_2";
    EmbeddingParams tp = params;
    tp.p = p / (2.0 - p);
    tp.q = q / 2.0;
    const CarlesonReport tr = bounded_diagnose(weight, mu, tp, partition, wclass);
    rep.criterion = tr.statistics.front();
    if (tr.bounded == Answer::Yes && rep.criterion.status != Status::Converged) {
      for (const auto& s : tr.statistics) {
        if (s.name == "order_bounded_stat" && s.status == Status::Converged) rep.criterion = s;
      }
    }
    rep.criterion.name = "transformed_" + rep.criterion.name;
    rep.criterion.note = "exponents (" + short_number(tp.p) + ", " + short_number(tp.q) + ")";
    rep.verdict = tr.bounded == Answer::Yes  ? SummingVerdict::Summing
                  : tr.bounded == Answer::No ? SummingVerdict::NotSumming
                                             : SummingVerdict::Inconclusive;
    if (rep.verdict == SummingVerdict::Summing && rep.criterion.status != Status::Converged) {
      rep.verdict = SummingVerdict::Inconclusive;
    }
    for (const auto& n : tr.notes) rep.notes.push_back("transformed: " + n);
    for (auto preset : {TwoSummingPreset::A, TwoSummingPreset::B}) {
      Statistic s = Statistic::from(std::string("two_summing_") + to_string(preset),
                                    two_summing_stat(weight, mu, p, preset, params, grid));
      s.note = preset == TwoSummingPreset::A ? "b = p'/p" : "b = 2/p";
      rep.cross_statistics.push_back(s);
    }
    lb_e = 2.0 / p;
    lb_power = 0.5;
  } else if (p == 2.0 && q == 2.0) {
    rep.regime = "p2_hilbert";
    const HsResult hs = hs_norm(weight, mu, 512, grid);
    Statistic s = Statistic::from("hs_comparator", hs.comparator_detail);
    s.status = hs.status;
    s.note = hs.note;
    rep.criterion = s;
    Statistic t;
    t.name = "hs_truncated_sum";
    t.value = hs.truncated_sum;
    t.status = hs.series_status;
    t.ring_values = hs.block_sums;
    t.note = "N = 512, blocks of doubling length";
    rep.cross_statistics.push_back(t);
    rep.verdict = verdict_from(hs.status);
    if (!hs.note.empty()) rep.notes.push_back(hs.note);
    lb_e = 1.0;
    lb_power = 0.5;
  } else if (p > 2.0 && r >= p) {
    rep.regime = "p_ge2_r_ge_p";
    const IntegralResult ob = order_bounded_stat(weight, mu, params, grid);
    rep.criterion = Statistic::from("order_bounded_type", ob);
    rep.verdict = verdict_from(ob.status);
  } else if (p >= 2.0 && r >= pc && r <= p) {
    rep.regime = "p_ge2_mid";
    lb_e = r / p;
    lb_power = 1.0 / r;
    rep.reconstructed = true;
    rep.notes.push_back("cell-sum condition reconstructed from the lower estimates");
  } else if (p >= 2.0 && r < pc) {
    rep.regime = "p_ge2_small_r";
    lb_e = 1.0 / (p - 1.0);
    lb_power = (p - 1.0) / p;
  } else {
    throw Error(ErrorCode::UnsupportedRegime,
                "no characterization for p = " + short_number(p) + ", q = " + short_number(q) +
                    ", r = " + short_number(r) + " (needs 1 < p < 2 with 1 < q <= 2, p = q = 2, or p >= 2)");
  }

  if (rep.regime == "p_ge2_r_ge_p") {
    const auto F = Integrand::of_radius(
        [&](double rr, double u) { return std::exp(-(weight.log_omega_hat(rr) + std::log(u))); });
    const IntegralResult lb = integrate_measure(mu, F, WholeDisk{}, grid);
    rep.lower_bound_pi_r = std::pow(lb.value, 1.0 / p);
  } else {
    const CellSum cs = cell_sum_stat(weight, mu, partition, params, lb_e);
    rep.lower_bound_pi_r = std::pow(cs.value, lb_power);
    Statistic s;
    s.name = "cell_sum";
    s.value = cs.value;
    s.tail = cs.tail;
    s.status = cs.status;
    s.grid_level = params.cell_level;
    s.ring_values = cs.ring_values;
    s.note = "exponent " + short_number(lb_e) + " over " + std::to_string(cs.cells) + " cells";
    if (rep.regime == "p_ge2_mid" || rep.regime == "p_ge2_small_r") {
      s.heuristic = q != p;
      rep.heuristic = q != p;
      if (rep.heuristic) rep.notes.push_back("cell-sum criterion certified only for q = p");
      rep.criterion = s;
      rep.verdict = verdict_from(cs.status);
    } else {
      rep.cross_statistics.push_back(s);
    }
  }
  rep.notes.push_back("lower bound for pi_r on the capped disk, up to constants");

  if (!wclass.in_d()) {
    rep.verdict = SummingVerdict::Inconclusive;
    rep.notes.push_back("weight not certified in both doubling classes; verdict withheld");
  }
  if (!chain_holds(carleson, rep, p, r)) {
    throw Error(ErrorCode::InvariantViolation,
                std::string("summing verdict ") + to_string(rep.verdict) + " contradicts bounded=" +
                    to_string(carleson.bounded) + ", order_bounded=" + to_string(carleson.order_bounded));
  }
  return rep;
}

KhinchineResult khinchine_check(const std::vector<double>& c, double q, std::size_t samples, std::uint64_t seed) {
  if (!(q > 0.0)) throw std::invalid_argument("khinchine_check: q must be positive");
  if (samples < 10'000) throw std::invalid_argument("khinchine_check: at least 10^4 samples required");
  KhinchineResult out;
  out.samples = samples;
  CompensatedSum sq;
  for (double x : c) sq.add(x * x);
  const double norm = std::pow(sq.value(), q / 2.0);
  if (!(norm > 0.0)) return out;
  const std::size_t words = (c.size() + 63) / 64;
  const auto values = parallel_map<double>(samples, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t bits = counter_hash(seed, i * words + w);
      for (std::size_t b = 0; b < 64 && 64 * w + b < c.size(); ++b) {
        const double x = c[64 * w + b];
        s += ((bits >> b) & 1U) ? x : -x;
      }
    }
    return std::pow(std::abs(s), q) / norm;
  }, 4096);
  CompensatedSum m;
  for (double v : values) m.add(v);
  const double mean = m.value() / static_cast<double>(samples);
  CompensatedSum var;
  for (double v : values) var.add((v - mean) * (v - mean));
  out.ratio = mean;
  out.std_error = std::sqrt(var.value() / static_cast<double>(samples - 1) / static_cast<double>(samples));
  if (c.size() <= 20) {
    const std::uint64_t patterns = std::uint64_t{1} << c.size();
    CompensatedSum e;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t b = 0; b < c.size(); ++b) s += ((mask >> b) & 1U) ? c[b] : -c[b];
      e.add(std::pow(std::abs(s), q));
    }
    out.exact = e.value() / static_cast<double>(patterns) / norm;
  }
  return out;
}

std::vector<EquivalenceRow> verify_equivalence(const RadialWeight& weight, const std::vector<FamilyMember>& family,
                                               const EmbeddingParams& params, const CellPartition& partition,
                                               const WeightClassReport& wclass) {
  const double p = params.p;
  const double q = params.q;
  if (!(p > 1.0 && p < 2.0) || !(q > 1.0 && q <= 2.0)) {
    throw Error(ErrorCode::BadExponents, "verify_equivalence needs 1 < p < 2 and 1 < q <= 2");
  }
  const DiskGrid grid(params.grid);
  EmbeddingParams tp = params;
  tp.p = p / (2.0 - p);
  tp.q = q / 2.0;
  std::vector<EquivalenceRow> rows;
  for (const auto& member : family) {
    EquivalenceRow row;
    row.id = member.id;
    row.detail_a = two_summing_stat(weight, member.measure, p, TwoSummingPreset::A, params, grid);
    row.detail_b = two_summing_stat(weight, member.measure, p, TwoSummingPreset::B, params, grid);
    row.stat_a = row.detail_a.status;
    row.stat_b = row.detail_b.status;
    row.transformed_bounded = bounded_diagnose(weight, member.measure, tp, partition, wclass).bounded;
    const Status tb = status_from(row.transformed_bounded);
    row.agree_a = tb != Status::Inconclusive && row.stat_a == tb;
    row.agree_b = tb != Status::Inconclusive && row.stat_b == tb;
    row.agree = row.agree_a && row.agree_b;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bergman
