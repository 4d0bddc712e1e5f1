#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/carleson.hpp"
#include "bergman/summing.hpp"

namespace bergman {

using Json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";

// Line of every value in a JSON text, keyed by JSON pointer ("" is the root).
class JsonLocator {
 public:
  explicit JsonLocator(const std::string& text);
  // Line of the pointer or of its nearest located ancestor; 0 if unknown.
  int line(const std::string& pointer) const;

 private:
  std::map<std::string, int> lines_;
};

// Scenario file contents after validation. `echo` holds the normalized
// configuration with defaults filled in.
struct Scenario {
  std::string name;
  std::string origin;
  Json weight_spec;
  Json measure_spec;
  RadialWeight weight = RadialWeight::standard_alpha(0.0);
  std::optional<Measure> measure;
  std::vector<FamilyMember> family;
  EmbeddingParams params;
  std::uint64_t seed = 1;
  std::string output_json;
  std::string output_csv;
  Json echo;
};

// Throws CONFIG_INVALID with "origin:line: message" diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<config>");
Scenario load_scenario(const std::string& path);

RadialWeight parse_weight(const Json& spec);
Measure parse_measure(const Json& spec, const RadialWeight& weight);

Json to_json(const IntegralResult& r);
Json to_json(const Statistic& s);
Json to_json(const WeightClassReport& w);
Json to_json(const CarlesonReport& c);
Json to_json(const SummingReport& s);

// Full pipeline: weight class, boundedness, summing. `exit_code` is 0 when
// every verdict is decided and 3 otherwise.
struct RunResult {
  Json report;
  int exit_code = 0;
  std::string evidence_csv;
};
RunResult run_scenario(const Scenario& sc);

// Partial pipelines behind the CLI subcommands.
RunResult diagnose_scenario(const Scenario& sc);
RunResult summing_scenario(const Scenario& sc);

std::string equivalence_csv(const std::vector<EquivalenceRow>& rows);
std::string lattice_csv(const Lattice& lattice);

// Shortest round-trip decimal form of a double, as in the JSON reports.
std::string format_number(double v);

}  // namespace bergman
