#include <doctest.h>

#include <cmath>
#include <memory>

#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/rng.hpp"

using namespace bergman;

namespace {

DiskGrid grid(int j_max) {
  GridConfig cfg;
  cfg.j_max = j_max;
  return DiskGrid(cfg);
}

std::shared_ptr<const Lattice> lattice(double cap) {
  return std::make_shared<const Lattice>(generate_lattice(0.5, Metric::Bergman, cap));
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("mass examples") {
    const auto g = grid(14);
    const auto delta = Measure::atomic({{{0.3, 0.0}, 1.0}});
    CHECK(mass(delta, PseudoDisk{{0, 0}, 0.5}, g).value == 1.0);
    const auto area = Measure::density([](DiskPoint) { return 1.0; }, "1");
    CHECK(mass(area, PseudoDisk{{0, 0}, 0.5}, g).total() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::abs(mass(Measure::radial_power(1.0), WholeDisk{}, g).total() - 0.5) < 1e-6);
  }

  TEST_CASE("atom at a center fills exactly that cell") {
    const double cap = 1.0 - 1.0 / 64.0;
    auto lat = lattice(cap);
    const CellPartition part(lat);
    const auto table = cell_masses(Measure::atomic({{lat->centers[5], 1.0}}), part, grid(6));
    REQUIRE(table.masses.size() == lat->size());
    for (std::size_t k = 0; k < table.masses.size(); ++k) CHECK(table.masses[k] == (k == 5 ? 1.0 : 0.0));
    CHECK(table.additivity_error() == 0.0);
  }

  TEST_CASE("partition additivity") {
    const auto g = grid(8);
    const double cap = g.cap();
    auto lat = lattice(cap);
    const CellPartition part(lat);
    for (const auto& mu : {Measure::density([](DiskPoint z) { return 1.0 + z.re; }, "1+x"),
                           Measure::radial_power(0.5), Measure::radial_power(-0.5),
                           Measure::weighted_area(1.0, RadialWeight::standard_alpha(2.0))}) {
      const auto t = cell_masses(mu, part, g);
      INFO(mu.label());
      CHECK(t.additivity_error() <= 1e-6);
      double s = 0.0;
      for (double m : t.masses) {
        CHECK(m >= 0.0);
        s += m;
      }
      CHECK(s == doctest::Approx(t.total).epsilon(1e-12));
    }
    const auto atoms = Measure::atomic({{{0.1, 0.2}, 0.5}, {{-0.7, 0.1}, 2.0}, {{0.0, 0.9}, 1.25}});
    const auto t = cell_masses(atoms, part, g);
    CHECK(t.total == 3.75);
    CHECK(t.capped_total == 3.75);
  }

  TEST_CASE("weighted area cells match sampled cell areas") {
    // Area of each cell by Monte Carlo assignment of uniform points; cells
    // well inside the sampled disk only.
    const auto g = grid(8);
    auto lat = lattice(g.cap());
    const CellPartition part(lat);
    const auto t = cell_masses(Measure::weighted_area(1.0, RadialWeight::standard_alpha(0.0)), part, g);
    const double r_max = 0.9;
    const std::size_t n = 400000;
    std::vector<double> hits(lat->size(), 0.0);
    const auto probes = area_probes(n, r_max, 17);
    for (const auto& z : probes) hits[static_cast<std::size_t>(part.assign(z))] += 1.0;
    int checked = 0;
    for (std::size_t k = 0; k < lat->size(); ++k) {
      if (lat->centers[k].abs() > 0.75) continue;
      const double est = hits[k] / n * r_max * r_max;
      INFO("cell " << k << " mass " << t.masses[k] << " sampled " << est);
      CHECK(t.masses[k] / est >= 0.9);
      CHECK(t.masses[k] / est <= 1.1);
      ++checked;
    }
    CHECK(checked > 10);
  }

  TEST_CASE("mass is monotone under inclusion") {
    const auto g = grid(12);
    for (const auto& mu : {Measure::radial_power(-0.5), Measure::density([](DiskPoint z) { return z.abs2(); }, "|z|^2"),
                           Measure::atomic({{{0.5, 0.1}, 1.0}, {{0.52, 0.1}, 3.0}})}) {
      for (double a : {0.2, 0.6, 0.9}) {
        const DiskPoint c{a, 0.1};
        const double small = mass(mu, PseudoDisk{c, 0.2}, g).total();
        const double big = mass(mu, PseudoDisk{c, 0.5}, g).total();
        const double whole = mass(mu, WholeDisk{}, g).total();
        CHECK(small <= big + 1e-9);
        CHECK(big <= whole + 1e-9);
        const double sq = mass(mu, CarlesonSquare{c}, g).total();
        const double sq_outer = mass(mu, CarlesonSquare{DiskPoint{0.5 * a, 0.05}}, g).total();
        CHECK(sq <= sq_outer + 1e-9);
      }
    }
  }

  TEST_CASE("scaling multiplies every mass") {
    const auto g = grid(12);
    const double c = 3.7;
    const auto atoms = Measure::atomic({{{0.5, 0.1}, 1.0}, {{-0.2, 0.3}, 0.25}});
    CHECK(mass(atoms.scaled(c), WholeDisk{}, g).value == c * mass(atoms, WholeDisk{}, g).value);
    for (const auto& mu : {Measure::radial_power(0.7), Measure::density([](DiskPoint z) { return 2.0 + z.im; }, "2+y")}) {
      for (const Region& r : {Region{WholeDisk{}}, Region{PseudoDisk{{0.4, 0.4}, 0.5}}, Region{CarlesonSquare{{0.8, 0}}}}) {
        const double base = mass(mu, r, g).value;
        CHECK(mass(mu.scaled(c), r, g).value == doctest::Approx(c * base).epsilon(1e-12));
      }
    }
  }
}
