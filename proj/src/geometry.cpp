#include "bergman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bergman/error.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

void require_nonzero(DiskPoint p, const char* what) {
  if (p.abs2() == 0.0) throw Error(ErrorCode::UndefinedRegion, std::string(what) + " is undefined at the origin");
}

void require_in_disk(DiskPoint p, const char* what) {
  if (!p.in_disk()) throw std::invalid_argument(std::string(what) + ": point outside the unit disk");
}

}  // namespace

double rho(DiskPoint z, DiskPoint w) {
  const std::complex<double> a = z.z();
  const std::complex<double> b = w.z();
  const double num = std::abs(a - b);
  if (num == 0.0) return 0.0;
  // |1 - a conj(b)|^2 = |a - b|^2 + (1 - |a|^2)(1 - |b|^2), free of cancellation.
  const double den2 = num * num + z.one_minus_abs2() * w.one_minus_abs2();
  return std::min(num / std::sqrt(den2), std::nextafter(1.0, 0.0));
}

double beta_dist(DiskPoint z, DiskPoint w) {
  const double r = rho(z, w);
  return std::atanh(r);
}

DiskPoint mobius(DiskPoint a, DiskPoint z) {
  const std::complex<double> av = a.z();
  const std::complex<double> zv = z.z();
  return DiskPoint((av - zv) / (1.0 - std::conj(av) * zv));
}

double angle_gap(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > std::numbers::pi ? kTwoPi - d : d;
}

EuclideanDisk pseudo_disk_euclidean(DiskPoint z0, double r) {
  const double a2 = z0.abs2();
  const double den = 1.0 - r * r * a2;
  const double scale = (1.0 - r * r) / den;
  return {DiskPoint(z0.re * scale, z0.im * scale), r * (1.0 - a2) / den};
}

void validate_region(const Region& region) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PseudoDisk>) {
          require_in_disk(g.center, "pseudo_disk");
          if (!(g.r > 0.0 && g.r < 1.0)) throw std::invalid_argument("pseudo_disk: r must lie in (0,1)");
        } else if constexpr (std::is_same_v<T, BergmanDisk>) {
          require_in_disk(g.center, "bergman_disk");
          if (!(g.t > 0.0) || !std::isfinite(g.t)) throw std::invalid_argument("bergman_disk: t must be positive");
        } else if constexpr (std::is_same_v<T, CarlesonSquare>) {
          require_in_disk(g.a, "carleson_square");
          require_nonzero(g.a, "carleson_square");
        } else if constexpr (std::is_same_v<T, Cone>) {
          require_in_disk(g.zeta, "cone");
          require_nonzero(g.zeta, "cone");
        } else if constexpr (std::is_same_v<T, Tent>) {
          require_in_disk(g.z, "tent");
          require_nonzero(g.z, "tent");
        } else if constexpr (std::is_same_v<T, DyadicCell>) {
          if (g.K < 2 || g.M < 1 || g.j < 0) throw std::invalid_argument("dyadic_cell: need K >= 2, M >= 1, j >= 0");
          if (g.l < 0 || g.l >= ring_cells(g.K, g.j)) throw std::invalid_argument("dyadic_cell: l out of range");
          if (g.k < 1 || g.k > g.M * g.M) throw std::invalid_argument("dyadic_cell: k out of range");
        }
      },
      region);
}

bool region_contains(const Region& region, DiskPoint w) {
  validate_region(region);
  if (!w.in_disk()) return false;
  return std::visit(
      [&](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PseudoDisk>) {
          return rho(g.center, w) < g.r;
        } else if constexpr (std::is_same_v<T, BergmanDisk>) {
          return beta_dist(g.center, w) < g.t;
        } else if constexpr (std::is_same_v<T, CarlesonSquare>) {
          const double ra = g.a.abs();
          return w.abs() >= ra && angle_gap(w.arg(), g.a.arg()) < 0.5 * (1.0 - ra);
        } else if constexpr (std::is_same_v<T, Cone>) {
          const double rw = w.abs();
          const double half = 0.5 * (1.0 - rw / g.zeta.abs());
          if (rw == 0.0) return true;
          return angle_gap(g.zeta.arg(), w.arg()) < half;
        } else if constexpr (std::is_same_v<T, Tent>) {
          const double rw = w.abs();
          if (rw == 0.0) return false;
          return angle_gap(w.arg(), g.z.arg()) < 0.5 * (1.0 - g.z.abs() / rw);
        } else if constexpr (std::is_same_v<T, DyadicCell>) {
          const auto edges = ring_band_edges(g.K, g.j, g.M);
          const int band = (g.k - 1) / g.M;
          const int piece = (g.k - 1) % g.M;
          const double r = w.abs();
          if (r < edges[static_cast<std::size_t>(band)] || r >= edges[static_cast<std::size_t>(band + 1)]) return false;
          const double cells = static_cast<double>(ring_cells(g.K, g.j));
          const double pos = wrap_angle(w.arg()) / kTwoPi * cells;  // in cell units
          const double lo = static_cast<double>(g.l) + static_cast<double>(piece) / g.M;
          return pos >= lo && pos < lo + 1.0 / g.M;
        } else {
          return true;
        }
      },
      region);
}

bool region_euclidean_disk(const Region& region, EuclideanDisk& out) {
  if (const auto* p = std::get_if<PseudoDisk>(&region)) {
    out = pseudo_disk_euclidean(p->center, p->r);
    return true;
  }
  if (const auto* b = std::get_if<BergmanDisk>(&region)) {
    out = pseudo_disk_euclidean(b->center, rho_of_beta(b->t));
    return true;
  }
  return false;
}

double PolarShape::width(double r) const {
  double w = w0 + w1 * r;
  if (w2 != 0.0) w += r > 0.0 ? w2 / r : -kTwoPi;
  return std::clamp(w, 0.0, kTwoPi);
}

bool PolarShape::full_circle() const { return w1 == 0.0 && w2 == 0.0 && w0 >= kTwoPi; }

bool region_polar_shape(const Region& region, PolarShape& out) {
  validate_region(region);
  out = PolarShape{};
  return std::visit(
      [&](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PseudoDisk> || std::is_same_v<T, BergmanDisk>) {
          return false;
        } else if constexpr (std::is_same_v<T, CarlesonSquare>) {
          const double ra = g.a.abs();
          out.r_min = ra;
          out.theta_mid = g.a.arg();
          out.w0 = 1.0 - ra;
          return true;
        } else if constexpr (std::is_same_v<T, Cone>) {
          const double rz = g.zeta.abs();
          out.r_max = rz;
          out.theta_mid = g.zeta.arg();
          out.w0 = 1.0;
          out.w1 = -1.0 / rz;
          return true;
        } else if constexpr (std::is_same_v<T, Tent>) {
          const double rz = g.z.abs();
          out.r_min = rz;
          out.theta_mid = g.z.arg();
          out.w0 = 1.0;
          out.w2 = -rz;
          return true;
        } else if constexpr (std::is_same_v<T, DyadicCell>) {
          const auto edges = ring_band_edges(g.K, g.j, g.M);
          const int band = (g.k - 1) / g.M;
          const int piece = (g.k - 1) % g.M;
          out.r_min = edges[static_cast<std::size_t>(band)];
          out.r_max = edges[static_cast<std::size_t>(band + 1)];
          const double dtheta = kTwoPi / static_cast<double>(ring_cells(g.K, g.j));
          out.w0 = dtheta / g.M;
          out.theta_mid = (static_cast<double>(g.l) + (piece + 0.5) / g.M) * dtheta;
          return true;
        } else {
          return true;
        }
      },
      region);
}

double dyadic_radius(int K, int j) {
  if (j == 0) return 0.0;
  return -std::expm1(-j * std::log(static_cast<double>(K)));
}

std::int64_t ring_cells(int K, int j) {
  std::int64_t n = 1;
  for (int i = 0; i < j + 3; ++i) {
    if (n > std::numeric_limits<std::int64_t>::max() / K) throw Error(ErrorCode::Overflow, "ring cell count overflows");
    n *= K;
  }
  return n;
}

std::vector<double> ring_band_edges(int K, int j, int M) {
  const double a = dyadic_radius(K, j);
  const double b = dyadic_radius(K, j + 1);
  std::vector<double> edges(static_cast<std::size_t>(M) + 1);
  edges.front() = a;
  edges.back() = b;
  for (int i = 1; i < M; ++i) {
    edges[static_cast<std::size_t>(i)] = std::sqrt(a * a + (b * b - a * a) * i / M);
  }
  return edges;
}

std::vector<DyadicCellInfo> dyadic_cells(int K, int M, int j_max, std::int64_t max_cells) {
  if (K < 2 || M < 1 || j_max < 0) throw std::invalid_argument("dyadic_cells: need K >= 2, M >= 1, j_max >= 0");
  std::int64_t total = 0;
  for (int j = 0; j <= j_max; ++j) {
    total += ring_cells(K, j) * M * M;
    if (total > max_cells) throw Error(ErrorCode::Overflow, "dyadic cell count exceeds " + std::to_string(max_cells));
  }
  std::vector<DyadicCellInfo> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int j = 0; j <= j_max; ++j) {
    const std::int64_t n = ring_cells(K, j);
    const auto edges = ring_band_edges(K, j, M);
    const double dtheta = kTwoPi / static_cast<double>(n);
    const double area = (edges.back() * edges.back() - edges.front() * edges.front()) / static_cast<double>(n) /
                        (static_cast<double>(M) * M);
    for (std::int64_t l = 0; l < n; ++l) {
      for (int band = 0; band < M; ++band) {
        const double ra = edges[static_cast<std::size_t>(band)];
        const double rb = edges[static_cast<std::size_t>(band + 1)];
        const double rc = std::sqrt(0.5 * (ra * ra + rb * rb));
        for (int piece = 0; piece < M; ++piece) {
          const double theta = (static_cast<double>(l) + (piece + 0.5) / M) * dtheta;
          out.push_back({DyadicCell{j, l, band * M + piece + 1, K, M}, DiskPoint::polar(rc, theta), area});
        }
      }
    }
  }
  return out;
}

}  // namespace bergman
