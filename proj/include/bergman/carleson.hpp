#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class Answer { Yes, No, Inconclusive };
const char* to_string(Answer a);

struct EmbeddingParams {
  double p = 2.0;
  double q = 2.0;
  double r = 1.0;       // summing exponent
  double r_hyp = 0.5;   // pseudo-hyperbolic radius of Delta(., r)
  double lattice_t = 0.5;
  Metric metric = Metric::Bergman;
  // Lattice statistics run on the disk capped at 1 - 2^{-lattice_level}.
  int lattice_level = 12;
  // Cell masses are computed on the disk capped at 1 - 2^{-cell_level}.
  int cell_level = 10;
  GridConfig grid;
  double min_center_radius = 0.1;
  // Relative growth of the running sup over the last `window` rings that
  // still counts as stable.
  double sup_growth_tol = 0.05;
  int window = 5;
  std::size_t nested_budget = 20'000'000;

  void validate() const;
  double lattice_cap() const;
};

// One named quantity with its evidence.
struct Statistic {
  std::string name;
  double value = 0.0;
  double tail = 0.0;
  double error_estimate = 0.0;
  Status status = Status::Inconclusive;
  bool exceeds_cap = false;
  bool heuristic = false;
  int grid_level = 0;
  std::vector<double> ring_values;
  std::string note;

  static Statistic from(std::string name, const IntegralResult& r);
};

struct MaximalStat {
  double sup = 0.0;
  int argmax = -1;
  std::vector<double> ring_max;      // per lattice ring
  std::vector<double> running_sup;   // per lattice ring
  Answer verdict = Answer::Inconclusive;
};

// sup over centers a_k with |a_k| >= min_center_radius of
// mu(Delta(a_k, r_hyp)) / omega(S(a_k))^{q/p}, grouped by binary ring.
MaximalStat maximal_stat(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                         const CellPartition& partition);

// || B_mu ||_{L_w^{p/(p-q)}}^{p/(p-q)} with B_mu(z) = \int_{Gamma(z)} dmu / omega(T(.)).
IntegralResult bmu_norm(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                        const DiskGrid& grid);

// B_mu at one point.
double bmu_value(const RadialWeight& weight, const Measure& mu, DiskPoint z, const DiskGrid& grid);

// \int dmu / (tail(|z|)(1 - |z|))^{q/p}.
IntegralResult order_bounded_stat(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                                  const DiskGrid& grid);

Answer order_bounded_answer(const IntegralResult& r, double p, double q);

struct CarlesonReport {
  Answer bounded = Answer::Inconclusive;
  Answer order_bounded = Answer::Inconclusive;
  std::string regime;  // "p_le_q" or "p_gt_q"
  std::vector<Statistic> statistics;
  MaximalStat maximal;  // filled for p <= q
  std::vector<std::string> notes;
};

// Lattice and partition matching the params' cap.
std::shared_ptr<const CellPartition> make_partition(const EmbeddingParams& params);

// Throws UNSUPPORTED when the weight is not upper doubling; enforces
// order_bounded = yes => bounded = yes (INVARIANT_VIOLATION otherwise).
CarlesonReport bounded_diagnose(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params);
CarlesonReport bounded_diagnose(const RadialWeight& weight, const Measure& mu, const EmbeddingParams& params,
                                const CellPartition& partition, const WeightClassReport& wclass);

}  // namespace bergman
