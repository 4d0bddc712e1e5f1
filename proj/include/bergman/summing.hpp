#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bergman/carleson.hpp"
#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// Diagonal multiplier M_beta e_n = beta_n e_n on l^p, finitely supported.
using MultiplierSeq = std::vector<double>;

double lp_norm(const std::vector<double>& v, double s);

struct MultiplierPi {
  double value = 0.0;
  std::string regime;  // "p_le_2", "r_le_pprime", "exact", "r_ge_p"
  bool exact = false;
};

// pi_r(M_beta) on l^p up to constants; exact for p >= 2 and p' <= r <= p.
MultiplierPi multiplier_pi_r(const MultiplierSeq& beta, double p, double r);

struct CanonicalBasis {
  int n = 1;
};
struct RandomSearch {
  int n = 4;
  int iters = 64;
  std::uint64_t seed = 1;
};
using VectorFamily = std::variant<CanonicalBasis, RandomSearch>;

struct PiLowerBound {
  // Certified: numerator over an upper bound of the denominator.
  double value = 0.0;
  // Numerator over the coordinate-ascent denominator (random search only).
  double ascent_estimate = 0.0;
};

// (sum_k ||M_beta x_k||_p^r)^{1/r} / sup_{||a||_{r'} <= 1} ||sum_k a_k x_k||_p,
// maximized over the family.
PiLowerBound empirical_pi_lower_detail(const MultiplierSeq& beta, double p, double r, const VectorFamily& family);
double empirical_pi_lower(const MultiplierSeq& beta, double p, double r, const VectorFamily& family);

struct PietschResult {
  double closed_form = 0.0;
  double optimizer_value = 0.0;
  int iterations = 0;
  bool degenerate = false;  // every h_i vanishes
};

// min of sum h_i m_i / F_i over F >= 0 with sum F_i^sigma m_i <= 1.
PietschResult pietsch_inf(const std::vector<double>& h, const std::vector<double>& masses, double sigma);

struct HsResult {
  double truncated_sum = 0.0;
  double comparator = 0.0;
  double ratio = 0.0;
  Status series_status = Status::Inconclusive;
  Status comparator_status = Status::Inconclusive;
  // Joint status; disagreement is inconclusive.
  Status status = Status::Inconclusive;
  // Series terms summed over j in [2^k - 1, 2^{k+1} - 1).
  std::vector<double> block_sums;
  IntegralResult comparator_detail;
  std::string note;
};

// sum_{j <= N} \int |z|^{2j} dmu / (2 omega_{2j+1}) against
// \int dmu / (tail(|z|)(1 - |z|)).
HsResult hs_norm(const RadialWeight& weight, const Measure& mu, int N, const DiskGrid& grid);

// \int |z|^{2j} dmu(z).
double measure_moment(const Measure& mu, int j, const DiskGrid& grid);

struct CellSum {
  double value = 0.0;
  double tail = 0.0;
  Status status = Status::Inconclusive;
  std::vector<double> ring_values;
  // Lattice rings entering the sum; cells centred beyond are cut by the cap.
  int rings = 0;
  std::size_t cells = 0;
  int argmax = -1;

  double total() const { return value + tail; }
};

// sum_k (mu(D_k) / (tail(|a_k|)(1 - |a_k|)))^e grouped by the binary ring of
// a_k. `table` must come from cell_masses on a grid with `level` rings.
CellSum cell_sum_stat(const RadialWeight& weight, const CellPartition& partition, const CellMassTable& table,
                      int level, double e, bool atomic);
CellSum cell_sum_stat(const RadialWeight& weight, const Measure& mu, const CellPartition& partition,
                      const EmbeddingParams& params, double e);

enum class TwoSummingPreset { A, B };
const char* to_string(TwoSummingPreset p);

// \int mu(Delta(xi, r_hyp))^a (tail(|xi|)(1 - |xi|))^{-b} w(xi) dA(xi) with
// a = p'/2 and b = p'/p (A) or 2/p (B).
IntegralResult two_summing_stat(const RadialWeight& weight, const Measure& mu, double p, TwoSummingPreset preset,
                                const EmbeddingParams& params, const DiskGrid& grid);

enum class SummingVerdict { Summing, NotSumming, Inconclusive };
const char* to_string(SummingVerdict v);

struct SummingReport {
  std::string regime;  // p_in_1_2, p2_hilbert, p_ge2_r_ge_p, p_ge2_mid, p_ge2_small_r, unsupported
  SummingVerdict verdict = SummingVerdict::Inconclusive;
  Statistic criterion;
  std::vector<Statistic> cross_statistics;
  double lower_bound_pi_r = 0.0;
  bool heuristic = false;
  bool reconstructed = false;
  std::vector<std::string> notes;
};

// Regime router. Throws UNSUPPORTED_REGIME outside the proved parameter sets
// and INVARIANT_VIOLATION when the verdict contradicts `carleson`.
SummingReport classify_summing(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                               const CellPartition& partition, const WeightClassReport& wclass,
                               const CarlesonReport& carleson);

// Joint verdict chain: order_bounded = yes => summing for r >= p, and
// summing => bounded = yes. Upgrades an inconclusive bounded verdict.
void reconcile(CarlesonReport& carleson, SummingReport& summing, double p, double r);
bool chain_holds(const CarlesonReport& carleson, const SummingReport& summing, double p, double r);

struct KhinchineResult {
  double ratio = 0.0;
  double std_error = 0.0;
  // Exact expectation by enumeration when c has at most 20 entries.
  double exact = -1.0;
  std::size_t samples = 0;
};

// E|sum_n r_n c_n|^q / (sum_n c_n^2)^{q/2} with independent uniform signs.
KhinchineResult khinchine_check(const std::vector<double>& c, double q, std::size_t samples, std::uint64_t seed);

struct FamilyMember {
  std::string id;
  Measure measure;
};

struct EquivalenceRow {
  std::string id;
  Status stat_a = Status::Inconclusive;
  Status stat_b = Status::Inconclusive;
  Answer transformed_bounded = Answer::Inconclusive;
  bool agree_a = false;
  bool agree_b = false;
  bool agree = false;
  IntegralResult detail_a;
  IntegralResult detail_b;
};

// Requires 1 < p < 2 and 1 < q <= 2.
std::vector<EquivalenceRow> verify_equivalence(const RadialWeight& weight, const std::vector<FamilyMember>& family,
                                               const EmbeddingParams& params, const CellPartition& partition,
                                               const WeightClassReport& wclass);

}  // namespace bergman
