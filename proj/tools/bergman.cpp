// bergman: command-line front end for the Carleson embedding lab.
//
// Exit status: 0 decided, 3 inconclusive or unsupported, 2 configuration
// error, 1 internal failure (including invariant violations).

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bergman/error.hpp"
#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"
#include "bergman/scenario.hpp"

namespace {

using namespace bergman;

constexpr int kExitDecided = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUndecided = 3;

struct Options {
  std::string config;
  std::optional<int> grid_level;
  std::string output;
  std::optional<double> r;
  std::string weight;
  double t = 0.5;
  std::string metric = "bergman";
  double cap = 1.0 - std::ldexp(1.0, -10);
  int kernel_terms = 200;
  std::vector<double> alphas = {0.0, 1.0, 2.0};
};

Scenario load(const Options& o) {
  Scenario sc = load_scenario(o.config);
  if (o.grid_level) {
    if (*o.grid_level < 8 || *o.grid_level > 24) {
      throw Error(ErrorCode::ConfigInvalid, "--grid-level must lie in [8, 24]");
    }
    sc.params.grid.j_max = *o.grid_level;
    sc.echo["grid"]["j_max"] = *o.grid_level;
  }
  if (o.r) {
    if (!(*o.r >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "--r must be at least 1");
    sc.params.r = *o.r;
    sc.echo["params"]["r"] = *o.r;
  }
  return sc;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, path + ": cannot write");
  out << text;
}

int emit_result(const RunResult& res, const std::string& json_path, const std::string& csv_path) {
  emit(res.report.dump(2) + "\n", json_path);
  if (!csv_path.empty()) emit(res.evidence_csv, csv_path);
  return res.exit_code;
}

int cmd_weight_check(const Options& o) {
  RadialWeight w = RadialWeight::standard_alpha(0.0);
  Json spec;
  if (!o.weight.empty()) {
    try {
      spec = Json::parse(o.weight);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::ConfigInvalid, std::string("--weight: malformed JSON: ") + e.what());
    }
    w = parse_weight(spec);
  } else if (!o.config.empty()) {
    const Scenario sc = load(o);
    w = sc.weight;
    spec = sc.weight_spec;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "weight-check needs --config or --weight");
  }
  const WeightClassReport rep = classify_weight(w);
  Json out;
  out["tool"] = {{"name", "bergman"}, {"version", kToolVersion}};
  out["weight"] = spec;
  out["weight_class"] = to_json(rep);
  emit(out.dump(2) + "\n", o.output);
  const bool decided = rep.in_dhat != Verdict::Inconclusive && rep.in_dcheck != Verdict::Inconclusive;
  return decided ? kExitDecided : kExitUndecided;
}

int cmd_lattice(const Options& o) {
  if (!(o.t > 0.0 && o.t <= 2.0)) throw Error(ErrorCode::ConfigInvalid, "--t must lie in (0, 2]");
  if (!(o.cap > 0.0 && o.cap < 1.0)) throw Error(ErrorCode::ConfigInvalid, "--cap must lie in (0, 1)");
  Metric m;
  try {
    m = parse_metric(o.metric);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  const Lattice lat = generate_lattice(o.t, m, o.cap);
  emit(lattice_csv(lat), o.output);
  std::cerr << "lattice: " << lat.size() << " centers\n";
  return kExitDecided;
}

int cmd_kernel_test(const Options& o) {
  if (o.kernel_terms < 1) throw Error(ErrorCode::ConfigInvalid, "--terms must be positive");
  Json out;
  out["tool"] = {{"name", "bergman"}, {"version", kToolVersion}};
  out["terms"] = o.kernel_terms;
  Json rows = Json::array();
  double worst = 0.0;
  for (double a : o.alphas) {
    if (!(a > -1.0)) throw Error(ErrorCode::ConfigInvalid, "--alpha values must exceed -1");
    const double dev = kernel_closed_form_deviation(a, o.kernel_terms);
    worst = std::max(worst, dev);
    rows.push_back({{"alpha", a}, {"max_relative_deviation", dev}});
  }
  out["deviations"] = rows;
  out["max_relative_deviation"] = worst;
  emit(out.dump(2) + "\n", o.output);
  return kExitDecided;
}

int cmd_verify(const Options& o) {
  const Scenario sc = load(o);
  if (sc.family.empty()) throw Error(ErrorCode::ConfigInvalid, sc.origin + ": verify needs a \"family\" array");
  const WeightClassReport wclass = classify_weight(sc.weight);
  if (wclass.in_dhat == Verdict::NonMember) {
    throw Error(ErrorCode::Unsupported, "weight " + sc.weight.label() + " is not upper doubling");
  }
  const auto partition = make_partition(sc.params);
  const auto rows = verify_equivalence(sc.weight, sc.family, sc.params, *partition, wclass);
  emit(equivalence_csv(rows), o.output.empty() ? sc.output_csv : o.output);
  for (const auto& r : rows) {
    if (!r.agree) return kExitUndecided;
  }
  return kExitDecided;
}

int dispatch(const std::string& name, const Options& o) {
  if (name == "weight-check") return cmd_weight_check(o);
  if (name == "lattice") return cmd_lattice(o);
  if (name == "kernel-test") return cmd_kernel_test(o);
  if (name == "verify") return cmd_verify(o);
  const Scenario sc = load(o);
  const std::string json_path = o.output.empty() ? sc.output_json : o.output;
  if (name == "diagnose") return emit_result(diagnose_scenario(sc), json_path, "");
  if (name == "summing") return emit_result(summing_scenario(sc), json_path, "");
  return emit_result(run_scenario(sc), json_path, sc.output_csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for Carleson embeddings on weighted Bergman spaces"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--grid-level", o.grid_level, "Override grid j_max (refinement level)");

  auto* weight_check = app.add_subcommand("weight-check", "Classify a radial weight");
  weight_check->add_option("--config", o.config, "Scenario file");
  weight_check->add_option("--weight", o.weight, "Weight spec as inline JSON");

  auto* lattice = app.add_subcommand("lattice", "Emit lattice centers as CSV");
  lattice->add_option("--t", o.t, "Separation parameter")->capture_default_str();
  lattice->add_option("--metric", o.metric, "bergman or rho")->capture_default_str();
  lattice->add_option("--cap", o.cap, "Radius cap")->capture_default_str();

  auto* diagnose = app.add_subcommand("diagnose", "Boundedness report for a scenario");
  auto* summing = app.add_subcommand("summing", "r-summing report for a scenario");
  summing->add_option("--r", o.r, "Override the summing exponent");
  auto* verify = app.add_subcommand("verify", "Equivalence sweep as CSV");
  auto* run = app.add_subcommand("run", "Full pipeline for a scenario");
  for (auto* sub : {diagnose, summing, verify, run}) {
    sub->add_option("--config", o.config, "Scenario file")->required();
  }

  auto* kernel = app.add_subcommand("kernel-test", "Kernel series against closed forms");
  kernel->add_option("--terms", o.kernel_terms, "Series terms")->capture_default_str();
  kernel->add_option("--alpha", o.alphas, "Standard weight exponents");

  for (auto* sub : {weight_check, lattice, diagnose, summing, verify, run, kernel}) {
    sub->add_option("-o,--output", o.output, "Output file (default stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitInternal;
  try {
    code = dispatch(name, o);
  } catch (const Error& e) {
    std::cerr << "bergman: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigInvalid:
      case ErrorCode::BadExponents: code = kExitConfig; break;
      case ErrorCode::Unsupported:
      case ErrorCode::UnsupportedRegime:
      case ErrorCode::NestedBudget:
      case ErrorCode::CapTooClose:
      case ErrorCode::InsufficientResolution: code = kExitUndecided; break;
      default: code = kExitInternal; break;
    }
  } catch (const std::exception& e) {
    std::cerr << "bergman: internal error: " << e.what() << "\n";
    code = kExitInternal;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "bergman " << name << ": exit " << code << ", wall-clock " << secs << " s\n";
  return code;
}
