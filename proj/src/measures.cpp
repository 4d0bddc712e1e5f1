#include "bergman/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bergman/error.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1 - r at the i-th of n equal-area edges between u_a (inner) and u_b (outer).
double edge_u(double ua, double ub, int i, int n) {
  const double t = static_cast<double>(i) / n;
  const double one_minus_r2 = ua * (2.0 - ua) * (1.0 - t) + ub * (2.0 - ub) * t;
  const double r = std::sqrt(std::max(0.0, 1.0 - one_minus_r2));
  return one_minus_r2 / (1.0 + r);
}

int grid_ring(const DiskGrid& grid, double r) {
  if (r <= 0.0) return 0;
  const double u = 1.0 - r;
  const int j = static_cast<int>(std::floor(-std::log(u) / std::log(static_cast<double>(grid.K()))));
  return std::clamp(j, 0, grid.j_max() - 1);
}

}  // namespace

Measure Measure::atomic(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!a.z.in_disk()) throw std::invalid_argument("atomic measure: atom outside the disk");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw std::invalid_argument("atomic measure: masses must be positive");
  }
  Measure m;
  m.kind_ = Kind::Atomic;
  m.atoms_ = std::move(atoms);
  m.label_ = "atomic(" + std::to_string(m.atoms_.size()) + ")";
  return m;
}

Measure Measure::density(std::function<double(DiskPoint)> g, std::string label) {
  Measure m;
  m.kind_ = Kind::Density;
  m.general_ = std::move(g);
  m.label_ = std::move(label);
  return m;
}

Measure Measure::radial_power(double s) {
  if (!std::isfinite(s)) throw std::invalid_argument("radial_power: exponent must be finite");
  Measure m;
  m.kind_ = Kind::Radial;
  m.radial_ = [s](double, double u) { return s == 0.0 ? 1.0 : std::pow(u * (2.0 - u), s); };
  std::ostringstream os;
  os << "radial_power(" << s << ")";
  m.label_ = os.str();
  m.power_ = s;
  return m;
}

Measure Measure::radial(std::function<double(double, double)> g, std::string label) {
  Measure m;
  m.kind_ = Kind::Radial;
  m.radial_ = std::move(g);
  m.label_ = std::move(label);
  return m;
}

Measure Measure::weighted_area(double c, RadialWeight weight) {
  if (!(c > 0.0)) throw std::invalid_argument("weighted_area: c must be positive");
  Measure m;
  m.kind_ = Kind::WeightedArea;
  m.weight_ = std::make_shared<RadialWeight>(std::move(weight));
  m.scale_ = c;
  std::ostringstream os;
  os << "weighted_area(" << c << ", " << m.weight_->label() << ")";
  m.label_ = os.str();
  return m;
}

double Measure::radial_density(double r, double u) const {
  switch (kind_) {
    case Kind::Radial: return scale_ * radial_(r, u);
    case Kind::WeightedArea: return scale_ * weight_->density_u(u);
    default: throw std::logic_error("radial_density on a non-radial measure");
  }
}

double Measure::density_at(DiskPoint z) const {
  switch (kind_) {
    case Kind::Density: return scale_ * general_(z);
    case Kind::Radial:
    case Kind::WeightedArea: {
      const double r = z.abs();
      return radial_density(r, 1.0 - r);
    }
    case Kind::Atomic: break;
  }
  throw std::logic_error("density_at on an atomic measure");
}

Measure Measure::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  Measure m = *this;
  if (kind_ == Kind::Atomic) {
    for (Atom& a : m.atoms_) a.mass *= c;
  } else {
    m.scale_ *= c;
  }
  std::ostringstream os;
  os << c << "*" << label_;
  m.label_ = os.str();
  return m;
}

IntegralResult integrate_measure(const Measure& mu, const Integrand& F, const Region& region, const DiskGrid& grid) {
  if (mu.is_atomic()) {
    validate_region(region);
    CompensatedSum sum;
    for (const auto& a : mu.atoms()) {
      if (region_contains(region, a.z)) sum.add(a.mass * F(a.z));
    }
    IntegralResult r;
    r.value = sum.value();
    if (!std::isfinite(r.value)) throw Error(ErrorCode::NanIntegrand, "atomic sum is not finite");
    r.status = Status::Converged;
    r.grid_level = grid.j_max();
    return r;
  }
  if (mu.is_radial() && F.is_radial()) {
    return integrate(Integrand::of_radius([&](double r, double u) { return F.radial(r, u) * mu.radial_density(r, u); }),
                     nullptr, region, grid);
  }
  return integrate(Integrand::general([&](DiskPoint z) { return F(z) * mu.density_at(z); }), nullptr, region, grid);
}

IntegralResult mass(const Measure& mu, const Region& region, const DiskGrid& grid) {
  return integrate_measure(mu, Integrand::constant(1.0), region, grid);
}

double CellMassTable::additivity_error() const {
  const double ref = std::max(std::abs(capped_total), 1e-300);
  return std::abs(total - capped_total) / ref;
}

CellMassTable cell_masses(const Measure& mu, const CellPartition& partition, const DiskGrid& grid,
                          const CellMassOptions& opts) {
  const Lattice& lat = partition.lattice();
  CellMassTable table;
  table.masses.assign(lat.size(), 0.0);
  if (opts.ring_shares) table.ring_shares.resize(lat.size());
  table.cap = grid.cap();
  std::vector<CompensatedSum> acc(lat.size());

  auto credit = [&](int cell, int ring, double m) {
    acc[static_cast<std::size_t>(cell)].add(m);
    if (!opts.ring_shares) return;
    auto& shares = table.ring_shares[static_cast<std::size_t>(cell)];
    if (!shares.empty() && shares.back().first == ring) shares.back().second += m;
    else shares.emplace_back(ring, m);
  };

  if (mu.is_atomic()) {
    CompensatedSum total;
    for (const auto& a : mu.atoms()) {
      credit(partition.assign(a.z), grid_ring(grid, a.z.abs()), a.mass);
      total.add(a.mass);
    }
    for (std::size_t k = 0; k < acc.size(); ++k) table.masses[k] = acc[k].value();
    table.total = total.value();
    table.capped_total = table.total;
    return table;
  }

  const int R = opts.refine > 0 ? opts.refine
                                : std::max(grid.M(), static_cast<int>(std::ceil(4.0 / std::min(lat.t, 1.0))));
  const GaussRule& g = gauss_rule(4);
  for (int j = 0; j < grid.j_max(); ++j) {
    const double ua = std::pow(static_cast<double>(grid.K()), -j);
    const double ub = ua / grid.K();
    const std::int64_t cells = ring_cells(grid.K(), j);
    // Equal-area bands make the innermost band of ring 0 wider than a cell;
    // ring 0 uses twice as many bands, uniform in r.
    const int bands = j == 0 ? 2 * R : R;
    const std::size_t per_cell = static_cast<std::size_t>(bands) * R;
    const double dphi = kTwoPi / static_cast<double>(cells) / R;
    // Radial mass per unit angle of each band, for radial measures.
    std::vector<double> band_u(static_cast<std::size_t>(bands) + 1);
    for (int i = 0; i <= bands; ++i) {
      band_u[static_cast<std::size_t>(i)] = j == 0 ? 1.0 - (1.0 - ub) * i / bands : edge_u(ua, ub, i, bands);
    }
    band_u.front() = ua;
    band_u.back() = ub;
    std::vector<double> band_mass(static_cast<std::size_t>(bands));
    std::vector<double> band_r(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
      const double u0 = band_u[static_cast<std::size_t>(b)];
      const double u1 = band_u[static_cast<std::size_t>(b + 1)];
      const double r0 = 1.0 - u0;
      const double r1 = 1.0 - u1;
      band_r[static_cast<std::size_t>(b)] = std::sqrt(0.5 * (r0 * r0 + r1 * r1));
      if (mu.is_radial()) {
        CompensatedSum s;
        const double mid = 0.5 * (u0 + u1);
        const double half = 0.5 * (u0 - u1);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          const double u = mid + half * g.x[i];
          s.add(half * g.w[i] * mu.radial_density(1.0 - u, u) * (1.0 - u));
        }
        band_mass[static_cast<std::size_t>(b)] = s.value() / std::numbers::pi;
      } else {
        band_mass[static_cast<std::size_t>(b)] = 0.5 * (r1 * r1 - r0 * r0) / std::numbers::pi;
      }
    }
    const std::size_t n = static_cast<std::size_t>(cells) * per_cell;
    struct NodeMass {
      int cell;
      double mass;
    };
    const auto nodes = parallel_map<NodeMass>(n, [&](std::size_t idx) {
      const std::size_t l = idx / per_cell;
      const int b = static_cast<int>((idx % per_cell) / static_cast<std::size_t>(R));
      const int p = static_cast<int>(idx % static_cast<std::size_t>(R));
      const double theta = (static_cast<double>(l) * R + p + 0.5) * dphi;
      const DiskPoint z = DiskPoint::polar(band_r[static_cast<std::size_t>(b)], theta);
      const double m = mu.is_radial() ? band_mass[static_cast<std::size_t>(b)] * dphi
                                      : band_mass[static_cast<std::size_t>(b)] * dphi * mu.density_at(z);
      if (!std::isfinite(m)) throw Error(ErrorCode::NanIntegrand, "measure density is not finite");
      return NodeMass{partition.assign(z), m};
    }, 1024);
    for (const NodeMass& nm : nodes) credit(nm.cell, j, nm.mass);
  }
  CompensatedSum total;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    table.masses[k] = acc[k].value();
    total.add(acc[k]);
  }
  table.total = total.value();
  table.capped_total = mass(mu, WholeDisk{}, grid).value;
  return table;
}

}  // namespace bergman
