#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bergman/lattice.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// Positive measure on the disk. Densities are taken against normalized area.
class Measure {
 public:
  enum class Kind { Atomic, Density, Radial, WeightedArea };

  struct Atom {
    DiskPoint z;
    double mass = 0.0;
  };

  static Measure atomic(std::vector<Atom> atoms);
  static Measure density(std::function<double(DiskPoint)> g, std::string label);
  // (1 - |z|^2)^s dA.
  static Measure radial_power(double s);
  static Measure radial(std::function<double(double r, double u)> g, std::string label);
  // c * w(|z|) dA.
  static Measure weighted_area(double c, RadialWeight weight);

  Kind kind() const { return kind_; }
  bool is_atomic() const { return kind_ == Kind::Atomic; }
  bool is_radial() const { return kind_ == Kind::Radial || kind_ == Kind::WeightedArea; }
  const std::string& label() const { return label_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  // Exponent of the radial_power family, if that is what this is.
  std::optional<double> power() const { return power_; }
  double scale() const { return scale_; }

  // Density of a non-atomic measure.
  double density_at(DiskPoint z) const;
  double radial_density(double r, double u) const;

  // Same measure times c > 0.
  Measure scaled(double c) const;

 private:
  Measure() = default;

  Kind kind_ = Kind::Atomic;
  std::string label_;
  std::vector<Atom> atoms_;
  std::function<double(DiskPoint)> general_;
  std::function<double(double, double)> radial_;
  std::shared_ptr<const RadialWeight> weight_;
  std::optional<double> power_;
  double scale_ = 1.0;
};

// \int_region F dmu. Atomic measures sum exactly over atoms inside the
// region (status converged, no ring data).
IntegralResult integrate_measure(const Measure& mu, const Integrand& F, const Region& region, const DiskGrid& grid);

IntegralResult mass(const Measure& mu, const Region& region, const DiskGrid& grid);

struct CellMassTable {
  std::vector<double> masses;
  // Sum of the per-cell masses.
  double total = 0.0;
  // mu of the capped disk from an independent quadrature.
  double capped_total = 0.0;
  double cap = 0.0;
  // Ring (of the assignment mesh) holding each cell's mass, mass-weighted.
  std::vector<std::vector<std::pair<int, double>>> ring_shares;

  double additivity_error() const;
};

struct CellMassOptions {
  // Angular/radial pieces per grid cell used for node assignment; 0 picks
  // max(M, ceil(4 / t)).
  int refine = 0;
  bool ring_shares = false;
};

// Per-cell masses over the disk capped at r_{j_max} of `grid`.
CellMassTable cell_masses(const Measure& mu, const CellPartition& partition, const DiskGrid& grid,
                          const CellMassOptions& opts = {});

}  // namespace bergman
