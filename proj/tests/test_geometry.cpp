#include <doctest.h>

#include <cmath>
#include <complex>

#include "bergman/error.hpp"
#include "bergman/geometry.hpp"
#include "bergman/rng.hpp"
#include "oracles.hpp"

using namespace bergman;

namespace {

// Area-uniform point of radius <= r_max from stream `seed`.
DiskPoint sample(std::uint64_t seed, std::uint64_t i, double r_max = 0.999) {
  const double r = r_max * std::sqrt(counter_uniform(seed, 2 * i));
  const double th = 2.0 * oracle::kPi * counter_uniform(seed, 2 * i + 1);
  return DiskPoint::polar(r, th);
}

// Width of the angular interval at radius r for a polar shape, compared with
// direct membership at angles just inside and outside its edges.
void check_polar(const Region& region, std::uint64_t seed) {
  PolarShape shape;
  REQUIRE(region_polar_shape(region, shape));
  int checked = 0;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const DiskPoint w = sample(seed, i, 0.9999);
    const double r = w.abs();
    const bool in_r = r >= shape.r_min && r < shape.r_max;
    const double gap = angle_gap(w.arg(), shape.theta_mid);
    const double half = 0.5 * shape.width(r);
    if (std::abs(gap - half) < 1e-9 || std::abs(r - shape.r_min) < 1e-9) continue;
    const bool polar = in_r && (shape.full_circle() || gap < half);
    CHECK(polar == region_contains(region, w));
    ++checked;
  }
  CHECK(checked > 3000);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("distance examples") {
    CHECK(rho({0, 0}, {0.3, 0.4}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rho({0.2, -0.1}, {0.2, -0.1}) == 0.0);
    CHECK(rho({0.5, 0}, {-0.5, 0}) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(beta_dist({0.5, 0}, {-0.5, 0}) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(beta_dist({0.1, 0.1}, {0.1, 0.1}) == 0.0);
    CHECK(beta_dist({0, 0}, {0.5, 0}) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  }

  TEST_CASE("distances match the definition") {
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const DiskPoint z = sample(11, i);
      const DiskPoint w = sample(12, i);
      CHECK(rho(z, w) == doctest::Approx(oracle::rho(z.z(), w.z())).epsilon(1e-12));
      if (rho(z, w) < 0.999) CHECK(beta_dist(z, w) == doctest::Approx(oracle::beta(z.z(), w.z())).epsilon(1e-10));
    }
  }

  TEST_CASE("no cancellation near the boundary") {
    // Two points at distance 1e-9 apart radially near the circle: rho is the
    // ratio of tiny numbers and must keep precision.
    const double u = 1e-8;
    const DiskPoint z{1.0 - u, 0.0};
    const DiskPoint w{1.0 - 2.0 * u, 0.0};
    // Distances from the circle as stored (exact by Sterbenz).
    const double u1 = 1.0 - z.re;
    const double u2 = 1.0 - w.re;
    // (z - w)/(1 - zw) = (u2 - u1) / (u1 + u2 - u1 u2).
    CHECK(rho(z, w) == doctest::Approx((u2 - u1) / (u1 + u2 - u1 * u2)).epsilon(1e-12));
  }

  TEST_CASE("metric axioms on sampled triples") {
    for (std::uint64_t i = 0; i < 5000; ++i) {
      const DiskPoint a = sample(21, i);
      const DiskPoint b = sample(22, i);
      const DiskPoint c = sample(23, i);
      CHECK(rho(a, b) == rho(b, a));
      CHECK(beta_dist(a, b) == beta_dist(b, a));
      CHECK(rho(a, c) <= rho(a, b) + rho(b, c) + 1e-12);
      CHECK(beta_dist(a, c) <= beta_dist(a, b) + beta_dist(b, c) + 1e-12);
    }
  }

  TEST_CASE("Mobius maps preserve the pseudo-hyperbolic distance") {
    for (std::uint64_t i = 0; i < 5000; ++i) {
      const DiskPoint a = sample(31, i, 0.99);
      const DiskPoint z = sample(32, i, 0.99);
      const DiskPoint w = sample(33, i, 0.99);
      CHECK(std::abs(rho(mobius(a, z), mobius(a, w)) - rho(z, w)) < 1e-12);
      const DiskPoint back = mobius(a, mobius(a, z));
      CHECK(std::abs(back.re - z.re) < 1e-12);
      CHECK(std::abs(back.im - z.im) < 1e-12);
    }
  }

  TEST_CASE("membership examples") {
    CHECK(region_contains(PseudoDisk{{0, 0}, 0.5}, {0.3, 0}));
    CHECK(region_contains(CarlesonSquare{{0.3, 0}}, {0.3, 0}));
    CHECK_FALSE(region_contains(CarlesonSquare{{0.3, 0}}, {0.29, 0}));
    CHECK(region_contains(BergmanDisk{{0, 0}, 0.5}, {std::tanh(0.5) - 1e-12, 0}));
    CHECK_FALSE(region_contains(BergmanDisk{{0, 0}, 0.5}, {std::tanh(0.5) + 1e-12, 0}));
  }

  TEST_CASE("regions anchored at the origin are undefined") {
    for (const Region& r : {Region{CarlesonSquare{{0, 0}}}, Region{Cone{{0, 0}}}, Region{Tent{{0, 0}}}}) {
      try {
        validate_region(r);
        FAIL("expected UNDEFINED_REGION");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedRegion);
      }
    }
    CHECK_THROWS_AS(validate_region(PseudoDisk{{0, 0}, 1.5}), std::invalid_argument);
  }

  TEST_CASE("pseudo-disk Euclidean form") {
    const auto d = pseudo_disk_euclidean({0.5, 0}, 0.5);
    // Center (1 - r^2) a / (1 - r^2 |a|^2), radius r (1 - |a|^2) / (1 - r^2 |a|^2).
    CHECK(d.center.re == doctest::Approx(0.75 * 0.5 / (1.0 - 0.0625)).epsilon(1e-14));
    CHECK(d.radius == doctest::Approx(0.5 * 0.75 / (1.0 - 0.0625)).epsilon(1e-14));
    for (std::uint64_t c = 0; c < 20; ++c) {
      const DiskPoint z0 = sample(41, c, 0.999);
      const double r = 0.05 + 0.9 * counter_uniform(42, c);
      const auto e = pseudo_disk_euclidean(z0, r);
      for (std::uint64_t i = 0; i < 500; ++i) {
        const DiskPoint w = sample(43 + c, i, 0.99999);
        const double dr = rho(z0, w) - r;
        if (std::abs(dr) < 1e-9) continue;
        const bool euclid = std::hypot(w.re - e.center.re, w.im - e.center.im) < e.radius;
        CHECK(euclid == (dr < 0));
      }
    }
  }

  TEST_CASE("polar descriptions match membership") {
    check_polar(CarlesonSquare{{0.6, 0.3}}, 51);
    check_polar(CarlesonSquare{DiskPoint::polar(0.999, 2.0)}, 52);
    check_polar(Cone{DiskPoint::polar(0.8, -1.0)}, 53);
    check_polar(Tent{DiskPoint::polar(0.5, 3.0)}, 54);
    check_polar(DyadicCell{3, 17, 2, 2, 2}, 55);
    check_polar(WholeDisk{}, 56);
  }

  TEST_CASE("cones and tents are dual") {
    for (std::uint64_t i = 0; i < 5000; ++i) {
      const DiskPoint z = sample(61, i);
      const DiskPoint zeta = sample(62, i);
      if (z.abs() < 1e-6 || zeta.abs() < 1e-6) continue;
      CHECK(region_contains(Cone{zeta}, z) == region_contains(Tent{z}, zeta));
    }
  }

  TEST_CASE("dyadic mesh") {
    CHECK(dyadic_radius(2, 3) == 0.875);
    CHECK(ring_cells(2, 0) == 8);
    CHECK(ring_cells(3, 2) == 243);
    const auto cells = dyadic_cells(2, 1, 10);
    double area = 0.0;
    for (const auto& c : cells) {
      CHECK(c.area > 0.0);
      area += c.area;
    }
    const double cap = 1.0 - std::ldexp(1.0, -11);
    CHECK(area == doctest::Approx(cap * cap).epsilon(1e-12));
    CHECK_THROWS_AS(dyadic_cells(2, 2, 30, 1000), Error);
  }

  TEST_CASE("sub-rectangles of a ring have equal area") {
    const auto cells = dyadic_cells(2, 3, 4);
    for (const auto& c : cells) {
      if (c.cell.j != 4) continue;
      const double ring = dyadic_radius(2, 5) * dyadic_radius(2, 5) - dyadic_radius(2, 4) * dyadic_radius(2, 4);
      CHECK(c.area == doctest::Approx(ring / (ring_cells(2, 4) * 9.0)).epsilon(1e-12));
    }
    const auto edges = ring_band_edges(2, 4, 3);
    REQUIRE(edges.size() == 4);
    CHECK(edges.front() == doctest::Approx(dyadic_radius(2, 4)));
    CHECK(edges.back() == doctest::Approx(dyadic_radius(2, 5)));
  }
}
