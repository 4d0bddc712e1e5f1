#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bergman/geometry.hpp"

namespace bergman {

enum class Metric { Bergman, PseudoHyperbolic };

Metric parse_metric(const std::string& name);
const char* to_string(Metric m);

// Points bucketed by binary ring floor(-log2(1 - |z|)) and by one of the
// 2^{ring+3} angular sectors of that ring.
class PolarBuckets {
 public:
  void insert(int index, DiskPoint p);
  // Calls visit(index) for every stored point that may lie in `disk`.
  void query(const EuclideanDisk& disk, const std::function<void(int)>& visit) const;

  static int ring_of(double r);

 private:
  static std::uint64_t key(int ring, std::int64_t sector) {
    return (static_cast<std::uint64_t>(ring) << 48) | static_cast<std::uint64_t>(sector);
  }
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
  int max_ring_ = -1;
};

struct Lattice {
  double t = 0.5;
  Metric metric = Metric::Bergman;
  double radius_cap = 1.0 - 1.0 / 65536.0;
  std::vector<DiskPoint> centers;
  std::shared_ptr<const PolarBuckets> index;

  double distance(DiskPoint z, DiskPoint w) const;
  // Euclidean disk holding every point within metric distance `radius` of z.
  EuclideanDisk ball(DiskPoint z, double radius) const;
  // Indices of centers at distance < radius from z, ascending.
  std::vector<int> centers_within(DiskPoint z, double radius) const;
  std::size_t size() const { return centers.size(); }
};

struct LatticeOptions {
  std::size_t max_centers = 1'000'000;
  int candidate_M = 0;  // 0: max(2, ceil(2 / t))
};

// Greedy maximal t/2-separated set over the binary polar mesh, scanned by
// increasing radius then angle, starting at the origin.
Lattice generate_lattice(double t, Metric metric, double radius_cap, const LatticeOptions& opts = {});

// Nearest-center assignment, lowest index on ties.
class CellPartition {
 public:
  explicit CellPartition(std::shared_ptr<const Lattice> lattice);

  const Lattice& lattice() const { return *lattice_; }
  int assign(DiskPoint z) const;
  // Distance from z to its assigned center.
  double assign_distance(DiskPoint z, int& cell) const;

 private:
  std::shared_ptr<const Lattice> lattice_;
};

CellPartition assign_cells(std::shared_ptr<const Lattice> lattice);

// Largest number of disks D(a_k, t) containing one probe.
int overlap_count(const Lattice& lattice, const std::vector<DiskPoint>& probes);

// Points within the cap where the depth of the arrangement {D(a_k, t)} can
// peak: pairwise boundary intersections, boundary crossings of the cap circle
// and Euclidean disk centers. Every face of the arrangement has one of these
// on its closure.
std::vector<DiskPoint> overlap_witnesses(const Lattice& lattice);

// Supremum of the overlap count over the cap: the larger of the probe count
// and the closed-disk count at the witnesses.
int max_overlap(const Lattice& lattice, const std::vector<DiskPoint>& probes);

// Deterministic probes with uniform area density in |z| <= r_max.
std::vector<DiskPoint> area_probes(std::size_t n, double r_max, std::uint64_t seed);

}  // namespace bergman
