#include <doctest.h>

#include <array>
#include <cmath>
#include <memory>

#include "bergman/error.hpp"
#include "bergman/rng.hpp"
#include "bergman/summing.hpp"

using namespace bergman;

namespace {

MultiplierSeq geometric_beta(int n) {
  MultiplierSeq b;
  for (int i = 0; i < n; ++i) b.push_back(std::ldexp(1.0, -i));
  return b;
}

const CellPartition& shared_partition() {
  static const auto part = make_partition(EmbeddingParams{});
  return *part;
}

const WeightClassReport& flat_class() {
  static const auto rep = classify_weight(RadialWeight::standard_alpha(0.0));
  return rep;
}

EmbeddingParams params(double p, double q, double r) {
  EmbeddingParams e;
  e.p = p;
  e.q = q;
  e.r = r;
  return e;
}

SummingReport summing(const Measure& mu, const EmbeddingParams& prm) {
  const auto w = RadialWeight::standard_alpha(0.0);
  const auto car = bounded_diagnose(w, mu, prm, shared_partition(), flat_class());
  return classify_summing(w, mu, prm, shared_partition(), flat_class(), car);
}

// Objective at the Lagrange stationary point F_i ~ h_i^{1/(sigma+1)},
// scaled onto the constraint; independent of the closed-form algebra.
double pietsch_brute(const std::vector<double>& h, const std::vector<double>& m, double sigma) {
  double norm = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) norm += std::pow(h[i], sigma / (sigma + 1.0)) * m[i];
  const double scale = std::pow(norm, -1.0 / sigma);
  double obj = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] > 0.0) obj += h[i] * m[i] / (scale * std::pow(h[i], 1.0 / (sigma + 1.0)));
  }
  return obj;
}

}  // namespace

TEST_SUITE("summing") {
  TEST_CASE("multiplier examples") {
    const auto beta = geometric_beta(11);
    const auto exact = multiplier_pi_r(beta, 3.0, 2.0);
    CHECK(exact.exact);
    CHECK(exact.regime == "exact");
    CHECK(exact.value == doctest::Approx(std::sqrt(4.0 / 3.0 * (1.0 - std::pow(4.0, -11)))).epsilon(1e-14));
    for (auto [p, r] : {std::pair{1.5, 1.0}, std::pair{3.0, 1.2}, std::pair{3.0, 2.5}, std::pair{3.0, 6.0}}) {
      CHECK(multiplier_pi_r({1.0, 0.0, 0.0}, p, r).value == 1.0);
    }
    const auto low = multiplier_pi_r({1.0, 1.0}, 1.5, 3.0);
    CHECK_FALSE(low.exact);
    CHECK(low.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(multiplier_pi_r({1.0}, 1.0, 2.0), Error);
    CHECK_THROWS_AS(multiplier_pi_r({1.0}, 2.0, 0.5), Error);
  }

  TEST_CASE("multiplier norm is non-increasing in r") {
    for (double p : {2.0, 3.0, 5.0}) {
      const double pc = p / (p - 1.0);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        MultiplierSeq beta;
        for (int i = 0; i < 12; ++i) beta.push_back(counter_uniform(seed, static_cast<std::uint64_t>(i)));
        double prev = 1e300;
        for (int i = 0; i <= 20; ++i) {
          const double r = pc + (p - pc) * i / 20.0;
          const double v = multiplier_pi_r(beta, p, r).value;
          CHECK(v <= prev * (1.0 + 1e-14));
          prev = v;
        }
      }
    }
  }

  TEST_CASE("empirical lower bound examples") {
    const auto beta = geometric_beta(11);
    const double want = multiplier_pi_r(beta, 3.0, 2.0).value;
    CHECK(std::abs(empirical_pi_lower(beta, 3.0, 2.0, CanonicalBasis{11}) - want) < 1e-9);
    CHECK(empirical_pi_lower({1.0, 0.0, 0.0}, 3.0, 2.0, CanonicalBasis{3}) == doctest::Approx(1.0));
    CHECK(empirical_pi_lower({1.0, 0.0, 0.0}, 3.0, 2.0, RandomSearch{}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(empirical_pi_lower({1, 1, 1, 1}, 2.0, 2.0, CanonicalBasis{4}) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("empirical lower bound never exceeds the formula") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const double pc = p / (p - 1.0);
      for (double r : {1.0, 1.3, pc, 0.5 * (pc + p), p, p + 2.0}) {
        if (r < 1.0) continue;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
          MultiplierSeq beta;
          for (int i = 0; i < 6; ++i) beta.push_back(counter_uniform(seed, static_cast<std::uint64_t>(i)));
          const auto f = multiplier_pi_r(beta, p, r);
          const double canon = empirical_pi_lower(beta, p, r, CanonicalBasis{6});
          const double rnd = empirical_pi_lower(beta, p, r, RandomSearch{4, 32, seed});
          INFO("p=" << p << " r=" << r << " seed=" << seed);
          CHECK(rnd >= 0.0);
          if (f.exact) {
            CHECK(canon <= f.value + 1e-9);
            CHECK(rnd <= f.value + 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("canonical lower bound grows with n") {
    const MultiplierSeq beta = {0.9, 0.1, 0.5, 0.7, 0.05, 0.3, 0.8};
    for (double p : {2.0, 3.0}) {
      for (double r : {1.0, 2.0, 4.0}) {
        double prev = 0.0;
        for (int n = 1; n <= 7; ++n) {
          const double v = empirical_pi_lower(beta, p, r, CanonicalBasis{n});
          CHECK(v >= prev - 1e-15);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("Pietsch examples") {
    const auto one = pietsch_inf({3.0}, {1.0}, 1.0);
    CHECK(one.closed_form == doctest::Approx(3.0));
    CHECK(one.optimizer_value == doctest::Approx(3.0).epsilon(1e-12));
    const auto two = pietsch_inf({1.0, 4.0}, {0.5, 0.5}, 1.0);
    CHECK(two.closed_form == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(two.optimizer_value == doctest::Approx(2.25).epsilon(1e-10));
    const auto zero = pietsch_inf({0.0, 0.0}, {0.5, 0.5}, 2.0);
    CHECK(zero.degenerate);
    CHECK(zero.closed_form == 0.0);
  }

  TEST_CASE("Pietsch optimizer matches closed form and stationary point") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int n = 1 + static_cast<int>(counter_hash(seed, 0) % 16);
      const double sigma = std::array<double, 3>{0.5, 1.0, 2.0}[seed % 3];
      std::vector<double> h;
      std::vector<double> m;
      for (int i = 0; i < n; ++i) {
        h.push_back(std::exp(4.0 * counter_uniform(seed, 2 * i + 1) - 2.0));
        m.push_back(0.01 + counter_uniform(seed, 2 * i + 2));
      }
      const auto res = pietsch_inf(h, m, sigma);
      INFO("seed=" << seed << " n=" << n << " sigma=" << sigma);
      CHECK(res.optimizer_value == doctest::Approx(res.closed_form).epsilon(1e-3));
      CHECK(pietsch_brute(h, m, sigma) == doctest::Approx(res.closed_form).epsilon(1e-10));
      // Any feasible F does no better: uniform F.
      double mass = 0.0;
      for (double x : m) mass += x;
      const double F = std::pow(mass, -1.0 / sigma);
      double uniform = 0.0;
      for (int i = 0; i < n; ++i) uniform += h[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)] / F;
      CHECK(uniform >= res.closed_form * (1.0 - 1e-12));
    }
  }

  TEST_CASE("Hilbert-Schmidt examples") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const DiskGrid g;
    const auto d0 = hs_norm(flat, Measure::atomic({{{0, 0}, 1.0}}), 512, g);
    CHECK(d0.truncated_sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d0.comparator == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d0.ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d0.status == Status::Converged);
    const auto dh = hs_norm(flat, Measure::atomic({{{0.5, 0}, 1.0}}), 512, g);
    CHECK(dh.truncated_sum == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
    CHECK(dh.status == Status::Converged);
    const auto thin = hs_norm(flat, Measure::radial_power(0.5), 512, g);
    CHECK(thin.series_status == Status::Divergent);
    CHECK(thin.comparator_status == Status::Divergent);
    const auto a = hs_norm(flat, Measure::radial_power(1.5), 256, g);
    const auto b = hs_norm(flat, Measure::radial_power(1.5), 512, g);
    CHECK(a.status == Status::Converged);
    CHECK(b.status == Status::Converged);
    CHECK(b.ratio >= 0.2);
    CHECK(b.ratio <= 5.0);
    CHECK(std::abs(b.ratio - a.ratio) <= 0.1 * a.ratio);
  }

  TEST_CASE("radial moments match the beta function") {
    const DiskGrid g;
    const auto mu = Measure::radial_power(0.7);
    for (int j : {0, 1, 5, 40}) {
      // \int |z|^{2j} (1-|z|^2)^s dA/pi = B(j + 1, s + 1).
      const double want = std::exp(std::lgamma(j + 1.0) + std::lgamma(1.7) - std::lgamma(j + 2.7));
      CHECK(measure_moment(mu, j, g) == doctest::Approx(want).epsilon(1e-10));
    }
  }

  TEST_CASE("cell sum of a point mass at a center") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto& part = shared_partition();
    const DiskPoint a5 = part.lattice().centers[5];
    const auto cs = cell_sum_stat(flat, Measure::atomic({{a5, 1.0}}), part, EmbeddingParams{}, 1.0);
    const double want = 1.0 / (flat.omega_hat(a5.abs()) * (1.0 - a5.abs()));
    CHECK(cs.value == doctest::Approx(want).epsilon(1e-12));
    CHECK(cs.argmax == 5);
    CHECK(cs.status == Status::Converged);
  }

  TEST_CASE("cell sums detect divergence and its threshold") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto& part = shared_partition();
    const EmbeddingParams prm;
    CHECK(cell_sum_stat(flat, Measure::weighted_area(1.0, flat), part, prm, 1.0).status == Status::Divergent);
    // Terms scale like (1 - |a|)^{s - 1} over 2^j cells per ring: finite iff s > 1.
    CHECK(cell_sum_stat(flat, Measure::radial_power(0.9), part, prm, 1.0).status == Status::Divergent);
    CHECK(cell_sum_stat(flat, Measure::radial_power(1.1), part, prm, 1.0).status == Status::Converged);
  }

  TEST_CASE("classification examples") {
    const auto s15 = summing(Measure::radial_power(1.5), params(2, 2, 1));
    CHECK(s15.regime == "p2_hilbert");
    CHECK(s15.verdict == SummingVerdict::Summing);
    const auto s05 = summing(Measure::radial_power(0.5), params(2, 2, 1));
    CHECK(s05.verdict == SummingVerdict::NotSumming);

    const auto& part = shared_partition();
    const auto atom = summing(Measure::atomic({{{0.5, 0}, 1.0}}), params(3, 3, 2));
    CHECK(atom.regime == "p_ge2_mid");
    CHECK(atom.verdict == SummingVerdict::Summing);
    const int k = part.assign({0.5, 0});
    const double ak = part.lattice().centers[static_cast<std::size_t>(k)].abs();
    const auto flat = RadialWeight::standard_alpha(0.0);
    const double want = std::pow(1.0 / (flat.omega_hat(ak) * (1.0 - ak)), 1.0 / 3.0);
    CHECK(atom.lower_bound_pi_r == doctest::Approx(want).epsilon(1e-12));
  }

  TEST_CASE("regimes outside the proved range are refused") {
    try {
      (void)summing(Measure::radial_power(1.0), params(1.2, 3.0, 1.0));
      FAIL("expected UNSUPPORTED_REGIME");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedRegime);
    }
  }

  TEST_CASE("regime routing") {
    const auto mu = Measure::atomic({{{0.3, 0.2}, 1.0}});
    CHECK(summing(mu, params(1.5, 2, 1)).regime == "p_in_1_2");
    CHECK(summing(mu, params(3, 3, 4)).regime == "p_ge2_r_ge_p");
    CHECK(summing(mu, params(3, 3, 1.2)).regime == "p_ge2_small_r");
    const auto heur = summing(mu, params(3, 2, 2));
    CHECK(heur.regime == "p_ge2_mid");
    CHECK(heur.heuristic);
  }

  TEST_CASE("verdicts are invariant under scaling") {
    const double c = 7.0;
    for (auto prm : {params(2, 2, 1), params(3, 3, 2), params(3, 3, 1.2)}) {
      for (const auto& mu : {Measure::radial_power(1.5), Measure::atomic({{{0.5, 0.1}, 1.0}, {{-0.2, 0.6}, 2.0}})}) {
        const auto a = summing(mu, prm);
        const auto b = summing(mu.scaled(c), prm);
        INFO("p=" << prm.p << " r=" << prm.r << " " << mu.label());
        CHECK(a.verdict == b.verdict);
        if (a.regime == "p2_hilbert") {
          CHECK(b.criterion.value == doctest::Approx(c * a.criterion.value).epsilon(1e-9));
        } else {
          const double e = a.regime == "p_ge2_mid" ? prm.r / prm.p : 1.0 / (prm.p - 1.0);
          CHECK(b.criterion.value == doctest::Approx(std::pow(c, e) * a.criterion.value).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("implication chain") {
    CarlesonReport car;
    SummingReport sum;
    car.order_bounded = Answer::Yes;
    car.bounded = Answer::Yes;
    sum.verdict = SummingVerdict::NotSumming;
    CHECK_FALSE(chain_holds(car, sum, 3.0, 4.0));
    CHECK(chain_holds(car, sum, 3.0, 2.0));
    CHECK_THROWS_AS(reconcile(car, sum, 3.0, 4.0), Error);
    car.order_bounded = Answer::Inconclusive;
    car.bounded = Answer::Inconclusive;
    sum.verdict = SummingVerdict::Summing;
    reconcile(car, sum, 3.0, 2.0);
    CHECK(car.bounded == Answer::Yes);
    car.bounded = Answer::No;
    CHECK_FALSE(chain_holds(car, sum, 3.0, 2.0));
  }

  TEST_CASE("Khinchine ratios") {
    const std::vector<double> c = {0.3, 1.0, -2.0, 0.5, 0.25, 1.5};
    const auto q2 = khinchine_check(c, 2.0, 100000, 11);
    CHECK(std::abs(q2.ratio - 1.0) <= 3.0 * q2.std_error);
    CHECK(q2.exact == doctest::Approx(1.0).epsilon(1e-14));
    const auto single = khinchine_check({1.0}, 4.0, 10000, 3);
    CHECK(single.ratio == 1.0);
    const auto pair = khinchine_check({1.0, 1.0}, 4.0, 100000, 5);
    CHECK(std::abs(pair.ratio - 2.0) <= 3.0 * pair.std_error);
    CHECK(pair.exact == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(khinchine_check(c, 2.0, 100, 1), std::invalid_argument);
  }

  TEST_CASE("equivalence sweep basics") {
    const auto flat = RadialWeight::standard_alpha(0.0);
    const auto prm = params(1.5, 2.0, 1.0);
    CHECK(verify_equivalence(flat, {}, prm, shared_partition(), flat_class()).empty());
    const std::vector<FamilyMember> fam = {{"atom", Measure::atomic({{{0.5, 0.0}, 1.0}})}};
    const auto rows = verify_equivalence(flat, fam, prm, shared_partition(), flat_class());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].stat_a == Status::Converged);
    CHECK(rows[0].stat_b == Status::Converged);
    CHECK(rows[0].transformed_bounded == Answer::Yes);
    CHECK(rows[0].agree);
  }

  TEST_CASE("two-summing statistic for a point mass is a closed-form disk integral") {
    // For an atom at w, mu(Delta(xi, r)) = 1 on Delta(w, r), so the statistic
    // is \int_{Delta(w, r)} ((1 - |xi|)^2)^{-b} dA(xi) for the flat weight.
    const auto flat = RadialWeight::standard_alpha(0.0);
    const DiskPoint w{0.4, 0.0};
    const EmbeddingParams prm = params(1.5, 2.0, 1.0);
    const auto res = two_summing_stat(flat, Measure::atomic({{w, 1.0}}), 1.5, TwoSummingPreset::B, prm, DiskGrid{});
    const double b = 2.0 / 1.5;
    const auto want = integrate(Integrand::of_radius([b](double, double u) { return std::pow(u, -2.0 * b); }), nullptr,
                                PseudoDisk{w, prm.r_hyp}, DiskGrid{});
    CHECK(res.total() == doctest::Approx(want.total()).epsilon(1e-6));
  }
}
