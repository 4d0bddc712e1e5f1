#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bergman/geometry.hpp"
#include "bergman/weights.hpp"

namespace bergman {

struct GridConfig {
  int K = 2;
  int j_max = 14;
  int M = 2;
  double divergence_cap = 1e6;
  // Gauss-Legendre nodes per radial band.
  int radial_order = 4;
};

// Dyadic polar mesh: rings [r_j, r_{j+1}) for j < j_max, K^{j+3} angular
// cells per ring, each split into M x M pieces of equal area.
class DiskGrid {
 public:
  struct Node {
    DiskPoint center;
    double area = 0.0;
  };

  DiskGrid() : DiskGrid(GridConfig{}) {}
  explicit DiskGrid(const GridConfig& cfg);

  const GridConfig& config() const { return cfg_; }
  int K() const { return cfg_.K; }
  int j_max() const { return cfg_.j_max; }
  int M() const { return cfg_.M; }
  int refinement_level() const { return cfg_.j_max; }
  // Outermost radius covered: r_{j_max}.
  double cap() const { return dyadic_radius(cfg_.K, cfg_.j_max); }

  // Band edges of ring j in the variable u = 1 - r, ascending in r.
  const std::vector<double>& band_edges_u(int j) const { return edges_u_.at(static_cast<std::size_t>(j)); }
  // One node per sub-rectangle (area-median radius, mid angle).
  std::vector<Node> nodes() const;

  DiskGrid with_levels(int j_max) const;

 private:
  GridConfig cfg_;
  std::vector<std::vector<double>> edges_u_;
};

// f(z); when `radial` is set it must equal f and is evaluated as radial(r, 1-r).
struct Integrand {
  std::function<double(DiskPoint)> f;
  std::function<double(double r, double u)> radial;

  static Integrand constant(double c);
  static Integrand of_radius(std::function<double(double r, double u)> g);
  static Integrand general(std::function<double(DiskPoint)> g);
  bool is_radial() const { return static_cast<bool>(radial); }
  double operator()(DiskPoint z) const;
};

enum class Status { Converged, Divergent, Inconclusive };
const char* to_string(Status s);

struct IntegralResult {
  // Sum over the capped mesh.
  double value = 0.0;
  // Geometric extrapolation of the remaining rings (converged only).
  double tail = 0.0;
  double error_estimate = 0.0;
  Status status = Status::Inconclusive;
  bool exceeds_cap = false;
  std::vector<double> ring_increments;
  int grid_level = 0;

  double total() const { return value + tail; }
};

struct DivergenceRule {
  int min_rings = 8;
  int window = 5;
  double cap = 1e6;
  double converged_ratio = 1e-8;
};

// Decides from per-ring increments. Divergent: positive increments whose
// log-linear slope over the last `window` rings is >= 0. Converged: the slope
// is negative, the last increment is negligible, or the tail is identically
// zero. Anything else, including fewer than `min_rings` rings, is
// inconclusive.
Status detect_divergence(const std::vector<double>& increments, const DivergenceRule& rule = {});

// Geometric tail from the ratio of the last two increments; 0 unless that
// ratio lies in (0, 1).
double geometric_tail(const std::vector<double>& increments);

// \int_region f(z) w(|z|) dA(z) / pi (normalized area). `density` may be
// null for w = 1. Throws NAN_INTEGRAND on non-finite samples.
IntegralResult integrate(const Integrand& f, const RadialWeight* density, const Region& region, const DiskGrid& grid);

// Fixed-order rule on a Euclidean disk inside the unit disk (order n radial
// nodes; 2n angles for non-radial f).
double disk_rule(const Integrand& f, const RadialWeight* density, const EuclideanDisk& disk, int n);

// Gauss-Legendre rule on [-1, 1] for orders 2, 3, 4, 5, 8, 10, 16, 20, 32.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_rule(int order);

}  // namespace bergman
