#include "bergman/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "bergman/error.hpp"
#include "bergman/rng.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxRing = 50;

std::int64_t sectors(int ring) { return std::int64_t{1} << (ring + 3); }

std::int64_t sector_of(int ring, double theta) {
  double a = std::fmod(theta, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  const std::int64_t n = sectors(ring);
  return std::min<std::int64_t>(static_cast<std::int64_t>(a / kTwoPi * static_cast<double>(n)), n - 1);
}

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "bergman" || name == "beta") return Metric::Bergman;
  if (name == "rho" || name == "pseudo_hyperbolic") return Metric::PseudoHyperbolic;
  throw Error(ErrorCode::ConfigInvalid, "unknown metric '" + name + "'");
}

const char* to_string(Metric m) { return m == Metric::Bergman ? "bergman" : "rho"; }

int PolarBuckets::ring_of(double r) {
  if (r <= 0.0) return 0;
  if (r >= 1.0) return kMaxRing;
  return std::clamp(static_cast<int>(std::floor(-std::log2(1.0 - r))), 0, kMaxRing);
}

void PolarBuckets::insert(int index, DiskPoint p) {
  const int ring = ring_of(p.abs());
  buckets_[key(ring, sector_of(ring, p.arg()))].push_back(index);
  max_ring_ = std::max(max_ring_, ring);
}

void PolarBuckets::query(const EuclideanDisk& disk, const std::function<void(int)>& visit) const {
  if (max_ring_ < 0) return;
  const double c = disk.center.abs();
  const double lo = std::max(0.0, c - disk.radius);
  const double hi = c + disk.radius;
  const int ring_lo = ring_of(lo);
  const int ring_hi = std::min(ring_of(hi), max_ring_);
  const double half = disk.radius < c ? std::asin(disk.radius / c) : std::numbers::pi;
  const double mid = disk.center.arg();
  for (int ring = ring_lo; ring <= ring_hi; ++ring) {
    const std::int64_t n = sectors(ring);
    const double width = 2.0 * half / kTwoPi * static_cast<double>(n);
    if (half >= std::numbers::pi || width + 2.0 >= static_cast<double>(n)) {
      for (std::int64_t s = 0; s < n; ++s) {
        auto it = buckets_.find(key(ring, s));
        if (it != buckets_.end()) for (int i : it->second) visit(i);
      }
      continue;
    }
    const std::int64_t first = sector_of(ring, mid - half);
    const std::int64_t count = static_cast<std::int64_t>(std::ceil(width)) + 2;
    for (std::int64_t d = 0; d < count; ++d) {
      auto it = buckets_.find(key(ring, (first + d) % n));
      if (it != buckets_.end()) for (int i : it->second) visit(i);
    }
  }
}

double Lattice::distance(DiskPoint z, DiskPoint w) const {
  return metric == Metric::Bergman ? beta_dist(z, w) : rho(z, w);
}

EuclideanDisk Lattice::ball(DiskPoint z, double radius) const {
  double r = metric == Metric::Bergman ? rho_of_beta(radius) : radius;
  r = std::min(r, 1.0 - 1e-15);
  EuclideanDisk d = pseudo_disk_euclidean(z, r);
  d.radius *= 1.0 + 1e-12;
  return d;
}

std::vector<int> Lattice::centers_within(DiskPoint z, double radius) const {
  std::vector<int> out;
  if (!index) throw std::logic_error("lattice has no index");
  index->query(ball(z, radius), [&](int i) {
    if (distance(z, centers[static_cast<std::size_t>(i)]) < radius) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

Lattice generate_lattice(double t, Metric metric, double radius_cap, const LatticeOptions& opts) {
  if (!(t > 0.0)) throw std::invalid_argument("generate_lattice: t must be positive");
  if (metric == Metric::Bergman && t > 2.0) throw std::invalid_argument("generate_lattice: t must lie in (0, 2]");
  if (metric == Metric::PseudoHyperbolic && t >= 1.0) throw std::invalid_argument("generate_lattice: rho radius below 1");
  if (!(radius_cap > 0.0 && radius_cap < 1.0)) throw std::invalid_argument("generate_lattice: radius_cap in (0,1)");

  Lattice lat;
  lat.t = t;
  lat.metric = metric;
  lat.radius_cap = radius_cap;
  auto buckets = std::make_shared<PolarBuckets>();
  lat.index = buckets;
  const int M = opts.candidate_M > 0 ? opts.candidate_M : std::max(2, static_cast<int>(std::ceil(2.0 / t)));
  const double sep = 0.5 * t;

  auto offer = [&](DiskPoint p) {
    if (p.abs() > radius_cap) return;
    bool free = true;
    buckets->query(lat.ball(p, sep), [&](int i) {
      if (free && lat.distance(p, lat.centers[static_cast<std::size_t>(i)]) < sep) free = false;
    });
    if (!free) return;
    if (lat.centers.size() >= opts.max_centers) {
      throw Error(ErrorCode::CapTooClose, "radius_cap " + std::to_string(radius_cap) + " needs more than " +
                                              std::to_string(opts.max_centers) + " centers");
    }
    buckets->insert(static_cast<int>(lat.centers.size()), p);
    lat.centers.push_back(p);
  };

  auto offer_ring = [&](double radius, std::int64_t cells) {
    const double dtheta = kTwoPi / static_cast<double>(cells);
    for (std::int64_t l = 0; l < cells; ++l) {
      for (int piece = 0; piece < M; ++piece) {
        offer(DiskPoint::polar(radius, (static_cast<double>(l) + (piece + 0.5) / M) * dtheta));
      }
    }
  };

  offer(DiskPoint{0.0, 0.0});
  int j = 0;
  for (; dyadic_radius(2, j) < radius_cap; ++j) {
    const auto edges = ring_band_edges(2, j, M);
    const std::int64_t cells = ring_cells(2, j);
    for (int band = 0; band < M; ++band) {
      const double ra = edges[static_cast<std::size_t>(band)];
      const double rb = edges[static_cast<std::size_t>(band + 1)];
      const double rc = std::sqrt(0.5 * (ra * ra + rb * rb));
      if (rc > radius_cap) {
        // Closing ring on the cap itself, at the angular resolution of the
        // band it cuts; without it the shell between the last band and the
        // cap stays uncovered.
        offer_ring(radius_cap, cells);
        return lat;
      }
      offer_ring(rc, cells);
    }
  }
  offer_ring(radius_cap, ring_cells(2, j));
  return lat;
}

CellPartition::CellPartition(std::shared_ptr<const Lattice> lattice) : lattice_(std::move(lattice)) {
  if (!lattice_ || lattice_->centers.empty()) throw std::invalid_argument("CellPartition: empty lattice");
}

double CellPartition::assign_distance(DiskPoint z, int& cell) const {
  const Lattice& lat = *lattice_;
  double radius = lat.metric == Metric::Bergman ? lat.t : std::min(lat.t, 0.999);
  for (int attempt = 0; attempt < 12; ++attempt) {
    const auto near = lat.centers_within(z, radius);
    if (!near.empty()) {
      double best = lat.distance(z, lat.centers[static_cast<std::size_t>(near.front())]);
      cell = near.front();
      for (int i : near) {
        const double d = lat.distance(z, lat.centers[static_cast<std::size_t>(i)]);
        if (d < best) {
          best = d;
          cell = i;
        }
      }
      return best;
    }
    radius = lat.metric == Metric::Bergman ? 2.0 * radius : 1.0 - 0.5 * (1.0 - radius);
  }
  double best = lat.distance(z, lat.centers.front());
  cell = 0;
  for (std::size_t i = 1; i < lat.centers.size(); ++i) {
    const double d = lat.distance(z, lat.centers[i]);
    if (d < best) {
      best = d;
      cell = static_cast<int>(i);
    }
  }
  return best;
}

int CellPartition::assign(DiskPoint z) const {
  int cell = 0;
  assign_distance(z, cell);
  return cell;
}

CellPartition assign_cells(std::shared_ptr<const Lattice> lattice) { return CellPartition(std::move(lattice)); }

int overlap_count(const Lattice& lattice, const std::vector<DiskPoint>& probes) {
  std::size_t best = 0;
  for (const DiskPoint& p : probes) best = std::max(best, lattice.centers_within(p, lattice.t).size());
  return static_cast<int>(best);
}

namespace {

// Intersection points of two circles; none when they are disjoint, nested or
// concentric.
void circle_crossings(EuclideanDisk a, EuclideanDisk b, std::vector<DiskPoint>& out) {
  const std::complex<double> ca = a.center.z();
  const std::complex<double> cb = b.center.z();
  const double d = std::abs(cb - ca);
  if (d == 0.0 || d >= a.radius + b.radius || d <= std::abs(a.radius - b.radius)) return;
  const double x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - x * x));
  const std::complex<double> e = (cb - ca) / d;
  const std::complex<double> foot = ca + x * e;
  const std::complex<double> normal = e * std::complex<double>(0.0, 1.0);
  out.emplace_back(foot + h * normal);
  out.emplace_back(foot - h * normal);
}

}  // namespace

std::vector<DiskPoint> overlap_witnesses(const Lattice& lattice) {
  const double r = lattice.metric == Metric::Bergman ? rho_of_beta(lattice.t) : lattice.t;
  std::vector<EuclideanDisk> disks;
  disks.reserve(lattice.size());
  for (const DiskPoint& a : lattice.centers) disks.push_back(pseudo_disk_euclidean(a, r));
  const EuclideanDisk cap{DiskPoint{0.0, 0.0}, lattice.radius_cap};

  std::vector<DiskPoint> raw;
  for (std::size_t i = 0; i < disks.size(); ++i) {
    raw.push_back(disks[i].center);
    circle_crossings(disks[i], cap, raw);
    // Partners whose disks can meet D(a_i, t) lie within 2t.
    for (int j : lattice.centers_within(lattice.centers[i], 2.0 * lattice.t)) {
      if (static_cast<std::size_t>(j) > i) circle_crossings(disks[i], disks[static_cast<std::size_t>(j)], raw);
    }
  }
  std::vector<DiskPoint> out;
  out.reserve(raw.size());
  for (const DiskPoint& p : raw) {
    if (p.abs() <= lattice.radius_cap) out.push_back(p);
  }
  return out;
}

int max_overlap(const Lattice& lattice, const std::vector<DiskPoint>& probes) {
  std::size_t best = static_cast<std::size_t>(overlap_count(lattice, probes));
  // Closed disks at the witnesses; the relative slack absorbs the rounding of
  // points that sit on a boundary circle by construction.
  const double closed = lattice.t * (1.0 + 1e-9);
  for (const DiskPoint& p : overlap_witnesses(lattice)) best = std::max(best, lattice.centers_within(p, closed).size());
  return static_cast<int>(best);
}

std::vector<DiskPoint> area_probes(std::size_t n, double r_max, std::uint64_t seed) {
  std::vector<DiskPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = r_max * std::sqrt(counter_uniform(seed, 2 * i));
    const double theta = kTwoPi * counter_uniform(seed, 2 * i + 1);
    out.push_back(DiskPoint::polar(r, theta));
  }
  return out;
}

}  // namespace bergman
