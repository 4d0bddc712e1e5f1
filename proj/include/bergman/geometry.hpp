#pragma once

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "bergman/point.hpp"

namespace bergman {

double rho(DiskPoint z, DiskPoint w);
double beta_dist(DiskPoint z, DiskPoint w);
// Pseudo-hyperbolic radius of the Bergman disk D(z, t).
inline double rho_of_beta(double t) { return std::tanh(t); }
inline double beta_of_rho(double r) { return std::atanh(r); }

// phi_a(z) = (a - z) / (1 - conj(a) z); an involution of the disk.
DiskPoint mobius(DiskPoint a, DiskPoint z);

// Angle difference folded into [0, pi].
double angle_gap(double a, double b);

struct EuclideanDisk {
  DiskPoint center;
  double radius = 0.0;
};

// Delta(z0, r) as a Euclidean disk.
EuclideanDisk pseudo_disk_euclidean(DiskPoint z0, double r);

struct PseudoDisk {
  DiskPoint center;
  double r = 0.5;
};
struct BergmanDisk {
  DiskPoint center;
  double t = 0.5;
};
// S(a): |a| <= |w| < 1 and |arg w - arg a| < (1 - |a|) / 2.
struct CarlesonSquare {
  DiskPoint a;
};
// Gamma(zeta): |arg zeta - arg w| < (1 - |w| / |zeta|) / 2.
struct Cone {
  DiskPoint zeta;
};
// T(z) = { zeta : z in Gamma(zeta) }.
struct Tent {
  DiskPoint z;
};
// Sub-rectangle k (1-based) of the polar rectangle Q_{j,l} for base K.
struct DyadicCell {
  int j = 0;
  std::int64_t l = 0;
  int k = 1;
  int K = 2;
  int M = 1;
};
struct WholeDisk {};

using Region = std::variant<PseudoDisk, BergmanDisk, CarlesonSquare, Cone, Tent, DyadicCell, WholeDisk>;

// Throws UNDEFINED_REGION for squares, cones and tents anchored at 0 and
// std::invalid_argument for out-of-range parameters.
void validate_region(const Region& region);
bool region_contains(const Region& region, DiskPoint w);

// Euclidean form of pseudo/Bergman disks; false for every other region.
bool region_euclidean_disk(const Region& region, EuclideanDisk& out);

// Polar description used by the quadrature: radial extent, and at each
// radius an angular interval centered at `theta_mid` of width `width(r)`.
struct PolarShape {
  double r_min = 0.0;
  double r_max = 1.0;
  double theta_mid = 0.0;
  // width(r) = clamp(w0 + w1 * r + w2 / r, 0, 2 pi).
  double w0 = 2.0 * 3.14159265358979323846;
  double w1 = 0.0;
  double w2 = 0.0;

  double width(double r) const;
  bool full_circle() const;
};

// Polar shape for every region except pseudo/Bergman disks (returns false).
bool region_polar_shape(const Region& region, PolarShape& out);

// r_j = 1 - K^{-j}.
double dyadic_radius(int K, int j);
// Number of angular cells of ring j: K^{j+3}.
std::int64_t ring_cells(int K, int j);

struct DyadicCellInfo {
  DyadicCell cell;
  DiskPoint center;
  double area = 0.0;  // normalized area
};

// All sub-rectangles of rings 0..j_max. Throws OVERFLOW past max_cells.
std::vector<DyadicCellInfo> dyadic_cells(int K, int M, int j_max, std::int64_t max_cells = 20'000'000);

// Radial band edges of ring j split into M pieces of equal area.
std::vector<double> ring_band_edges(int K, int j, int M);

}  // namespace bergman
