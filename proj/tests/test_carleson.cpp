#include <doctest.h>

#include <cmath>
#include <memory>

#include "bergman/carleson.hpp"
#include "bergman/error.hpp"
#include "oracles.hpp"

using namespace bergman;

namespace {

EmbeddingParams params(double p, double q) {
  EmbeddingParams e;
  e.p = p;
  e.q = q;
  return e;
}

const CellPartition& shared_partition() {
  static const auto part = make_partition(EmbeddingParams{});
  return *part;
}

}  // namespace

TEST_SUITE("carleson") {
  TEST_CASE("order-bounded statistic examples") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const DiskGrid g;
    const auto d0 = order_bounded_stat(flat, Measure::atomic({{{0, 0}, 1.0}}), params(2, 2), g);
    CHECK(d0.total() == doctest::Approx(1.0).epsilon(1e-14));
    const auto area = Measure::radial_power(0.0);
    const auto quarter = order_bounded_stat(flat, area, params(4, 1), g);
    CHECK(quarter.status == Status::Converged);
    CHECK(std::abs(quarter.total() - 8.0 / 3.0) < 1e-3);
    const auto full = order_bounded_stat(flat, area, params(2, 2), g);
    CHECK(full.status == Status::Divergent);
    CHECK(order_bounded_answer(full, 2, 2) == Answer::No);
    CHECK(order_bounded_answer(full, 2, 1) == Answer::Inconclusive);
  }

  TEST_CASE("order-bounded threshold follows the exponent law") {
    // \int (1-|z|^2)^s / (tail (1-|z|))^{q/p}: finite iff s > (a+2) q/p - 1.
    const DiskGrid g;
    for (double a : {0.0, 1.0}) {
      const auto w = RadialWeight::standard_alpha(a);
      for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{4.0, 1.0}, std::pair{2.0, 4.0}}) {
        const double star = (a + 2.0) * q / p - 1.0;
        INFO("alpha=" << a << " p=" << p << " q=" << q << " s*=" << star);
        CHECK(order_bounded_stat(w, Measure::radial_power(star - 0.05), params(p, q), g).status == Status::Divergent);
        CHECK(order_bounded_stat(w, Measure::radial_power(star + 0.05), params(p, q), g).status == Status::Converged);
      }
    }
  }

  TEST_CASE("maximal statistic for a point mass") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto& part = shared_partition();
    const auto prm = params(2, 3);
    const auto ms = maximal_stat(flat, Measure::atomic({{{0.5, 0.0}, 1.0}}), prm, part);
    // Direct oracle: centers whose pseudo-disk holds the atom.
    double want = 0.0;
    for (const auto& a : part.lattice().centers) {
      if (a.abs() < prm.min_center_radius) continue;
      if (oracle::rho(a.z(), {0.5, 0.0}) < prm.r_hyp) want = std::max(want, std::pow(flat.square_mass(a.abs()), -1.5));
    }
    CHECK(want > 0.0);
    CHECK(ms.sup == doctest::Approx(want).epsilon(1e-12));
    CHECK(ms.verdict == Answer::Yes);
  }

  TEST_CASE("boundedness examples") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto& part = shared_partition();
    const auto wclass = classify_weight(flat);
    const auto prm = params(2, 2);
    CHECK(bounded_diagnose(flat, Measure::weighted_area(1.0, flat), prm, part, wclass).bounded == Answer::Yes);
    const auto grow = bounded_diagnose(flat, Measure::radial_power(-0.5), prm, part, wclass);
    CHECK(grow.bounded == Answer::No);
    CHECK(grow.order_bounded == Answer::No);
    try {
      (void)bounded_diagnose(RadialWeight::exponential(1.0), Measure::radial_power(0.0), prm);
      FAIL("expected UNSUPPORTED");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unsupported);
    }
  }

  TEST_CASE("maximal threshold follows the exponent law") {
    const auto& part = shared_partition();
    for (double a : {0.0, 1.0}) {
      const auto w = RadialWeight::standard_alpha(a);
      for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{2.0, 4.0}}) {
        const double star = (a + 2.0) * q / p - 2.0;
        INFO("alpha=" << a << " p=" << p << " q=" << q << " s*=" << star);
        CHECK(maximal_stat(w, Measure::radial_power(star - 0.1), params(p, q), part).verdict == Answer::No);
        CHECK(maximal_stat(w, Measure::radial_power(star + 0.1), params(p, q), part).verdict == Answer::Yes);
      }
    }
  }

  TEST_CASE("tent functional of a point mass is exact") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const DiskGrid g;
    const auto prm = params(2, 1);  // exponent p / (p - q) = 2
    for (double m : {1.0, 0.3}) {
      const DiskPoint w{0.5, 0.2};
      const double tent = flat.tent_mass(w.abs());
      const auto r = bmu_norm(flat, Measure::atomic({{w, m}}), prm, g);
      CHECK(r.status == Status::Converged);
      CHECK(r.total() == doctest::Approx(m * m / tent).epsilon(1e-6));
    }
    // Atoms on opposite sides have disjoint tents.
    const DiskPoint u{0.6, 0.0};
    const DiskPoint v{-0.3, 0.0};
    const auto two = bmu_norm(flat, Measure::atomic({{u, 1.0}, {v, 2.0}}), prm, g);
    const double want = 1.0 / flat.tent_mass(0.6) + 4.0 / flat.tent_mass(0.3);
    CHECK(two.total() == doctest::Approx(want).epsilon(1e-6));
    const double bu = bmu_value(flat, Measure::atomic({{u, 1.0}}), {0.9, 0.0}, g);
    CHECK(bu == doctest::Approx(1.0 / flat.tent_mass(0.6)).epsilon(1e-14));
  }

  TEST_CASE("tent functional for area measure converges and refines") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto prm = params(2, 1);
    GridConfig coarse_cfg;
    coarse_cfg.j_max = 12;
    const auto coarse = bmu_norm(flat, Measure::radial_power(0.0), prm, DiskGrid(coarse_cfg));
    const auto fine = bmu_norm(flat, Measure::radial_power(0.0), prm, DiskGrid{});
    CHECK(coarse.status == Status::Converged);
    CHECK(fine.status == Status::Converged);
    CHECK(fine.total() == doctest::Approx(coarse.total()).epsilon(0.05));
  }

  TEST_CASE("point masses away from the origin are bounded for p > q") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto rep = bounded_diagnose(flat, Measure::atomic({{{0.5, 0.0}, 1.0}}), params(3, 2), shared_partition(),
                                      classify_weight(flat));
    CHECK(rep.regime == "p_gt_q");
    CHECK(rep.bounded == Answer::Yes);
  }

  TEST_CASE("order-bounded implies bounded") {
    const auto& part = shared_partition();
    for (double a : {0.0, 2.0}) {
      const auto w = RadialWeight::standard_alpha(a);
      const auto wclass = classify_weight(w);
      for (double s : {-0.5, 0.5, 1.5, 3.0, 6.0}) {
        for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{2.0, 3.0}, std::pair{3.0, 2.0}}) {
          const auto rep = bounded_diagnose(w, Measure::radial_power(s), params(p, q), part, wclass);
          INFO("alpha=" << a << " s=" << s << " p=" << p << " q=" << q);
          if (rep.order_bounded == Answer::Yes) CHECK(rep.bounded == Answer::Yes);
        }
      }
    }
  }

  TEST_CASE("scaling the measure scales the statistics") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto& part = shared_partition();
    const DiskGrid g;
    const double c = 5.5;
    const auto prm = params(2, 2);
    const auto atoms = Measure::atomic({{{0.5, 0.0}, 1.0}, {{0.1, -0.7}, 0.2}});
    const auto ma = maximal_stat(flat, atoms, prm, part);
    const auto mb = maximal_stat(flat, atoms.scaled(c), prm, part);
    CHECK(mb.sup == doctest::Approx(c * ma.sup).epsilon(1e-15));
    CHECK(mb.verdict == ma.verdict);
    CHECK(order_bounded_stat(flat, atoms.scaled(c), prm, g).value ==
          doctest::Approx(c * order_bounded_stat(flat, atoms, prm, g).value).epsilon(1e-15));
    const auto radial = Measure::radial_power(1.5);
    const auto ra = maximal_stat(flat, radial, prm, part);
    const auto rb = maximal_stat(flat, radial.scaled(c), prm, part);
    CHECK(rb.sup == doctest::Approx(c * ra.sup).epsilon(1e-9));
    CHECK(rb.verdict == ra.verdict);
    const auto oa = order_bounded_stat(flat, radial, prm, g);
    const auto ob = order_bounded_stat(flat, radial.scaled(c), prm, g);
    CHECK(ob.total() == doctest::Approx(c * oa.total()).epsilon(1e-9));
    CHECK(ob.status == oa.status);
  }

  TEST_CASE("parameter validation") {
    EmbeddingParams bad;
    bad.r_hyp = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    EmbeddingParams lvl;
    lvl.cell_level = 13;
    CHECK_THROWS_AS(lvl.validate(), Error);
  }
}
