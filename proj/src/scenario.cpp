#include "bergman/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bergman/error.hpp"
#include "bergman/expression.hpp"

namespace bergman {

namespace {

std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Reads a JSON string literal starting at text[i] == '"'; returns the
// decoded key for pointer purposes (escapes kept verbatim except \" and \\).
std::string read_string(const std::string& text, std::size_t& i) {
  std::string out;
  ++i;
  while (i < text.size() && text[i] != '"') {
    if (text[i] == '\\' && i + 1 < text.size()) {
      ++i;
      if (text[i] == '"' || text[i] == '\\' || text[i] == '/') out += text[i];
      else out += '\\', out += text[i];
    } else {
      out += text[i];
    }
    ++i;
  }
  ++i;
  return out;
}

class Reader {
 public:
  Reader(const JsonLocator& loc, std::string origin) : loc_(loc), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    throw Error(ErrorCode::ConfigInvalid, origin_ + ":" + std::to_string(loc_.line(pointer)) + ": " +
                                              (pointer.empty() ? std::string("/") : pointer) + ": " + msg);
  }

  void only_keys(const Json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(ptr + "/" + escape_pointer_token(k), "unknown key \"" + k + "\"");
    }
  }

  double number(const Json& obj, const std::string& ptr, const char* key, std::optional<double> def) const {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) {
      if (def) return *def;
      fail(ptr, std::string("missing required number \"") + key + "\"");
    }
    const Json& v = obj.at(key);
    if (!v.is_number()) fail(p, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(p, "expected a finite number");
    return d;
  }

  int integer(const Json& obj, const std::string& ptr, const char* key, int def) const {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) return def;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) fail(p, "expected an integer");
    return v.get<int>();
  }

  std::string string(const Json& obj, const std::string& ptr, const char* key, std::optional<std::string> def) const {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) {
      if (def) return *def;
      fail(ptr, std::string("missing required string \"") + key + "\"");
    }
    if (!obj.at(key).is_string()) fail(p, "expected a string");
    return obj.at(key).get<std::string>();
  }

  void require(bool ok, const std::string& ptr, const std::string& msg) const {
    if (!ok) fail(ptr, msg);
  }

 private:
  const JsonLocator& loc_;
  std::string origin_;
};

RadialWeight read_weight(const Reader& rd, const Json& spec, const std::string& ptr, Json& echo) {
  rd.only_keys(spec, ptr, {"kind", "alpha", "c", "expr"});
  const std::string kind = rd.string(spec, ptr, "kind", std::nullopt);
  echo = Json::object();
  echo["kind"] = kind;
  try {
    if (kind == "standard_alpha") {
      const double alpha = rd.number(spec, ptr, "alpha", 0.0);
      rd.require(alpha > -1.0, ptr + "/alpha", "alpha must exceed -1");
      echo["alpha"] = alpha;
      return RadialWeight::standard_alpha(alpha);
    }
    if (kind == "exponential") {
      const double c = rd.number(spec, ptr, "c", 1.0);
      rd.require(c > 0.0, ptr + "/c", "c must be positive");
      echo["c"] = c;
      return RadialWeight::exponential(c);
    }
    if (kind == "custom") {
      const std::string expr = rd.string(spec, ptr, "expr", std::nullopt);
      echo["expr"] = expr;
      return RadialWeight::custom(expr);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    rd.fail(ptr, e.what());
  } catch (const std::invalid_argument& e) {
    rd.fail(ptr, e.what());
  }
  rd.fail(ptr + "/kind", "unknown weight kind \"" + kind + "\" (standard_alpha, exponential, custom)");
}

Measure read_measure(const Reader& rd, const Json& spec, const std::string& ptr, const RadialWeight& weight,
                     Json& echo) {
  rd.only_keys(spec, ptr, {"kind", "atoms", "s", "c", "expr"});
  const std::string kind = rd.string(spec, ptr, "kind", std::nullopt);
  echo = Json::object();
  echo["kind"] = kind;
  if (kind == "atomic") {
    const std::string ap = ptr + "/atoms";
    rd.require(spec.contains("atoms") && spec.at("atoms").is_array() && !spec.at("atoms").empty(), ptr,
               "atomic measure needs a non-empty \"atoms\" array of [re, im, mass]");
    std::vector<Measure::Atom> atoms;
    Json out = Json::array();
    std::size_t i = 0;
    for (const auto& a : spec.at("atoms")) {
      const std::string p = ap + "/" + std::to_string(i++);
      rd.require(a.is_array() && a.size() == 3 && a[0].is_number() && a[1].is_number() && a[2].is_number(), p,
                 "atom must be [re, im, mass]");
      const DiskPoint z(a[0].get<double>(), a[1].get<double>());
      const double m = a[2].get<double>();
      rd.require(z.abs2() < 1.0, p, "atom must lie in the open unit disk");
      rd.require(m > 0.0 && std::isfinite(m), p, "atom mass must be positive");
      atoms.push_back({z, m});
      out.push_back(Json::array({z.re, z.im, m}));
    }
    echo["atoms"] = out;
    return Measure::atomic(std::move(atoms));
  }
  if (kind == "radial_power") {
    const double s = rd.number(spec, ptr, "s", std::nullopt);
    rd.require(s > -1.0, ptr + "/s", "s must exceed -1");
    echo["s"] = s;
    return Measure::radial_power(s);
  }
  if (kind == "weighted_area") {
    const double c = rd.number(spec, ptr, "c", 1.0);
    rd.require(c > 0.0, ptr + "/c", "c must be positive");
    echo["c"] = c;
    return Measure::weighted_area(c, weight);
  }
  if (kind == "radial") {
    const std::string expr = rd.string(spec, ptr, "expr", std::nullopt);
    echo["expr"] = expr;
    try {
      const Expression ex(expr);
      return Measure::radial([ex](double r, double u) { return ex(r, u); }, "radial(" + expr + ")");
    } catch (const std::exception& e) {
      rd.fail(ptr + "/expr", e.what());
    }
  }
  rd.fail(ptr + "/kind", "unknown measure kind \"" + kind + "\" (atomic, radial_power, weighted_area, radial)");
}

std::string verdict_word(Answer a) { return to_string(a); }

Json ring_array(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

void append_evidence(std::ostringstream& csv, const std::string& section, const Statistic& s) {
  for (std::size_t i = 0; i < s.ring_values.size(); ++i) {
    csv << section << ',' << s.name << ',' << i << ',' << format_number(s.ring_values[i]) << '\n';
  }
}

Json lattice_summary(const Lattice& lat) {
  Json j;
  j["t"] = lat.t;
  j["metric"] = to_string(lat.metric);
  j["radius_cap"] = lat.radius_cap;
  j["centers"] = lat.size();
  return j;
}

}  // namespace

JsonLocator::JsonLocator(const std::string& text) {
  struct Frame {
    bool object;
    std::string key;
    std::size_t index = 0;
    bool expect_key = true;
  };
  std::vector<Frame> stack;
  int line = 1;
  auto pointer = [&] {
    std::string p;
    for (const auto& f : stack) p += "/" + (f.object ? escape_pointer_token(f.key) : std::to_string(f.index));
    return p;
  };
  auto record = [&] { lines_.emplace(pointer(), line); };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
      ++i;
      continue;
    }
    if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) stack.back().expect_key = true;
        else ++stack.back().index;
      }
      ++i;
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      ++i;
      continue;
    }
    if (!stack.empty() && stack.back().object && stack.back().expect_key) {
      if (c == '"') {
        stack.back().key = read_string(text, i);
        stack.back().expect_key = false;
      } else {
        ++i;
      }
      continue;
    }
    record();
    if (c == '{') {
      stack.push_back({true, "", 0, true});
      ++i;
    } else if (c == '[') {
      stack.push_back({false, "", 0, false});
      ++i;
    } else if (c == '"') {
      read_string(text, i);
    } else {
      while (i < text.size() && text[i] != ',' && text[i] != '}' && text[i] != ']' && text[i] != '\n') ++i;
    }
  }
}

int JsonLocator::line(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    if (p.empty()) return 0;
    p.erase(p.rfind('/'));
  }
}

std::string format_number(double v) { return Json(v).dump(); }

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()) && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw Error(ErrorCode::ConfigInvalid, origin + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const JsonLocator loc(text);
  const Reader rd(loc, origin);
  rd.only_keys(root, "", {"name", "weight", "measure", "family", "params", "grid", "seed", "output"});

  Scenario sc;
  sc.origin = origin;
  sc.name = rd.string(root, "", "name", std::string("scenario"));
  sc.echo["name"] = sc.name;

  rd.require(root.contains("weight"), "", "missing required object \"weight\"");
  sc.weight = read_weight(rd, root.at("weight"), "/weight", sc.weight_spec);
  sc.echo["weight"] = sc.weight_spec;

  rd.require(root.contains("measure") || root.contains("family"), "",
             "scenario needs a \"measure\" object or a \"family\" array");
  if (root.contains("measure")) {
    sc.measure = read_measure(rd, root.at("measure"), "/measure", sc.weight, sc.measure_spec);
    sc.echo["measure"] = sc.measure_spec;
  }
  if (root.contains("family")) {
    const Json& fam = root.at("family");
    rd.require(fam.is_array(), "/family", "expected an array of {\"id\", \"measure\"}");
    Json echo = Json::array();
    std::set<std::string> ids;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const std::string p = "/family/" + std::to_string(i);
      rd.only_keys(fam[i], p, {"id", "measure"});
      const std::string id = rd.string(fam[i], p, "id", std::nullopt);
      rd.require(ids.insert(id).second, p + "/id", "duplicate member id \"" + id + "\"");
      rd.require(fam[i].contains("measure"), p, "missing required object \"measure\"");
      Json mecho;
      Measure m = read_measure(rd, fam[i].at("measure"), p + "/measure", sc.weight, mecho);
      sc.family.push_back({id, std::move(m)});
      echo.push_back(Json{{"id", id}, {"measure", mecho}});
    }
    sc.echo["family"] = echo;
  }

  EmbeddingParams& P = sc.params;
  const Json params = root.value("params", Json::object());
  rd.only_keys(params, "/params",
               {"p", "q", "r", "lattice_t", "r_hyp", "metric", "lattice_level", "cell_level", "min_center_radius",
                "nested_budget"});
  P.p = rd.number(params, "/params", "p", 2.0);
  P.q = rd.number(params, "/params", "q", 2.0);
  P.r = rd.number(params, "/params", "r", 1.0);
  rd.require(P.p > 0.0, "/params/p", "p must be positive");
  rd.require(P.q > 0.0, "/params/q", "q must be positive");
  rd.require(P.r >= 1.0, "/params/r", "r must be at least 1");
  P.lattice_t = rd.number(params, "/params", "lattice_t", 0.5);
  rd.require(P.lattice_t > 0.0 && P.lattice_t <= 2.0, "/params/lattice_t", "lattice_t must lie in (0, 2]");
  P.r_hyp = rd.number(params, "/params", "r_hyp", 0.5);
  rd.require(P.r_hyp > 0.0 && P.r_hyp < 1.0, "/params/r_hyp", "r_hyp must lie in (0, 1)");
  const std::string metric = rd.string(params, "/params", "metric", std::string("bergman"));
  try {
    P.metric = parse_metric(metric);
  } catch (const std::exception& e) {
    rd.fail("/params/metric", e.what());
  }
  P.lattice_level = rd.integer(params, "/params", "lattice_level", P.lattice_level);
  rd.require(P.lattice_level >= P.window + 2 && P.lattice_level <= 16, "/params/lattice_level",
             "lattice_level must lie in [7, 16]");
  P.cell_level = rd.integer(params, "/params", "cell_level", std::min(P.cell_level, P.lattice_level));
  rd.require(P.cell_level >= P.window + 2 && P.cell_level <= P.lattice_level, "/params/cell_level",
             "cell_level must lie in [7, lattice_level]");
  P.min_center_radius = rd.number(params, "/params", "min_center_radius", P.min_center_radius);
  rd.require(P.min_center_radius >= 0.0 && P.min_center_radius < 1.0, "/params/min_center_radius",
             "min_center_radius must lie in [0, 1)");
  const double budget = rd.number(params, "/params", "nested_budget", static_cast<double>(P.nested_budget));
  rd.require(budget >= 1.0, "/params/nested_budget", "nested_budget must be positive");
  P.nested_budget = static_cast<std::size_t>(budget);
  sc.echo["params"] = Json{{"p", P.p},
                           {"q", P.q},
                           {"r", P.r},
                           {"lattice_t", P.lattice_t},
                           {"r_hyp", P.r_hyp},
                           {"metric", to_string(P.metric)},
                           {"lattice_level", P.lattice_level},
                           {"cell_level", P.cell_level},
                           {"min_center_radius", P.min_center_radius},
                           {"nested_budget", P.nested_budget}};

  GridConfig& G = P.grid;
  const Json grid = root.value("grid", Json::object());
  rd.only_keys(grid, "/grid", {"K", "j_max", "M", "divergence_cap", "radial_order"});
  G.K = rd.integer(grid, "/grid", "K", G.K);
  rd.require(G.K >= 2 && G.K <= 8, "/grid/K", "K must lie in [2, 8]");
  G.j_max = rd.integer(grid, "/grid", "j_max", G.j_max);
  rd.require(G.j_max >= 8 && G.j_max <= 24, "/grid/j_max", "j_max must lie in [8, 24]");
  G.M = rd.integer(grid, "/grid", "M", G.M);
  rd.require(G.M >= 1 && G.M <= 16, "/grid/M", "M must lie in [1, 16]");
  G.divergence_cap = rd.number(grid, "/grid", "divergence_cap", G.divergence_cap);
  rd.require(G.divergence_cap > 0.0, "/grid/divergence_cap", "divergence_cap must be positive");
  G.radial_order = rd.integer(grid, "/grid", "radial_order", G.radial_order);
  try {
    gauss_rule(G.radial_order);
  } catch (const std::exception& e) {
    rd.fail("/grid/radial_order", e.what());
  }
  sc.echo["grid"] = Json{{"K", G.K}, {"j_max", G.j_max}, {"M", G.M}, {"divergence_cap", G.divergence_cap},
                         {"radial_order", G.radial_order}};

  if (root.contains("seed")) {
    rd.require(root.at("seed").is_number_unsigned(), "/seed", "seed must be a non-negative integer");
    sc.seed = root.at("seed").get<std::uint64_t>();
  }
  sc.echo["seed"] = sc.seed;

  if (root.contains("output")) {
    const Json& out = root.at("output");
    rd.only_keys(out, "/output", {"json", "csv"});
    sc.output_json = rd.string(out, "/output", "json", std::string());
    sc.output_csv = rd.string(out, "/output", "csv", std::string());
  }

  try {
    P.validate();
  } catch (const Error& e) {
    rd.fail("/params", e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

RadialWeight parse_weight(const Json& spec) {
  const std::string text = spec.dump();
  const JsonLocator loc(text);
  Json echo;
  return read_weight(Reader(loc, "<weight>"), spec, "", echo);
}

Measure parse_measure(const Json& spec, const RadialWeight& weight) {
  const std::string text = spec.dump();
  const JsonLocator loc(text);
  Json echo;
  return read_measure(Reader(loc, "<measure>"), spec, "", weight, echo);
}

Json to_json(const IntegralResult& r) {
  Json j;
  j["value"] = r.value;
  j["tail"] = r.tail;
  j["total"] = r.total();
  j["error_estimate"] = r.error_estimate;
  j["status"] = to_string(r.status);
  j["exceeds_cap"] = r.exceeds_cap;
  j["grid_level"] = r.grid_level;
  j["ring_increments"] = ring_array(r.ring_increments);
  return j;
}

Json to_json(const Statistic& s) {
  Json j;
  j["name"] = s.name;
  j["value"] = s.value;
  j["tail"] = s.tail;
  j["error_estimate"] = s.error_estimate;
  j["status"] = to_string(s.status);
  j["exceeds_cap"] = s.exceeds_cap;
  j["heuristic"] = s.heuristic;
  j["grid_level"] = s.grid_level;
  j["note"] = s.note;
  j["ring_values"] = ring_array(s.ring_values);
  return j;
}

Json to_json(const WeightClassReport& w) {
  Json j;
  j["d_hat"] = {{"verdict", to_string(w.in_dhat)}, {"c_hat", w.c_hat}, {"beta_hat", nullptr}};
  if (w.in_dhat == Verdict::Member) j["d_hat"]["beta_hat"] = w.beta_hat;
  j["d_check"] = {{"verdict", to_string(w.in_dcheck)}, {"K", w.k_check}, {"c_check", w.c_check}};
  j["class_r"] = {{"verdict", to_string(w.in_r)}, {"lower", w.r_lower}, {"upper", w.r_upper}};
  j["in_d"] = w.in_d();
  Json rows = Json::array();
  for (const auto& row : w.diagnostics) {
    rows.push_back({{"level", row.level},
                    {"r", row.r},
                    {"log_dhat_ratio", row.log_dhat_ratio},
                    {"log_dcheck_ratio", ring_array(row.log_dcheck_ratio)},
                    {"log_r_ratio", row.log_r_ratio}});
  }
  j["diagnostics"] = rows;
  j["notes"] = w.notes;
  return j;
}

Json to_json(const CarlesonReport& c) {
  Json j;
  j["regime"] = c.regime;
  j["bounded"] = verdict_word(c.bounded);
  j["order_bounded"] = verdict_word(c.order_bounded);
  Json stats = Json::array();
  for (const auto& s : c.statistics) stats.push_back(to_json(s));
  j["statistics"] = stats;
  if (c.regime == "p_le_q") {
    j["maximal"] = {{"sup", c.maximal.sup},
                    {"argmax", c.maximal.argmax},
                    {"verdict", verdict_word(c.maximal.verdict)},
                    {"ring_max", ring_array(c.maximal.ring_max)},
                    {"running_sup", ring_array(c.maximal.running_sup)}};
  }
  j["notes"] = c.notes;
  return j;
}

Json to_json(const SummingReport& s) {
  Json j;
  j["regime"] = s.regime;
  j["verdict"] = to_string(s.verdict);
  j["criterion"] = to_json(s.criterion);
  Json cross = Json::array();
  for (const auto& c : s.cross_statistics) cross.push_back(to_json(c));
  j["cross_statistics"] = cross;
  j["lower_bound_pi_r"] = s.lower_bound_pi_r;
  j["heuristic"] = s.heuristic;
  j["reconstructed"] = s.reconstructed;
  j["notes"] = s.notes;
  return j;
}

namespace {

struct Pipeline {
  Json report;
  std::ostringstream csv;
  bool decided = true;
  std::optional<CarlesonReport> carleson;
  std::shared_ptr<const CellPartition> partition;
  WeightClassReport wclass;
};

void start(Pipeline& pl, const Scenario& sc) {
  pl.report["tool"] = {{"name", "bergman"}, {"version", kToolVersion}};
  pl.report["scenario"] = sc.echo;
  pl.wclass = classify_weight(sc.weight);
  pl.report["weight_class"] = to_json(pl.wclass);
  pl.csv << "section,statistic,ring,value\n";
}

void run_carleson(Pipeline& pl, const Scenario& sc) {
  if (pl.wclass.in_dhat == Verdict::NonMember) {
    pl.report["carleson"] = {{"bounded", "inconclusive"},
                             {"order_bounded", "inconclusive"},
                             {"error", "UNSUPPORTED: weight " + sc.weight.label() + " is not upper doubling"}};
    pl.decided = false;
    return;
  }
  pl.partition = make_partition(sc.params);
  pl.report["lattice"] = lattice_summary(pl.partition->lattice());
  pl.carleson = bounded_diagnose(sc.weight, *sc.measure, sc.params, *pl.partition, pl.wclass);
}

void run_summing(Pipeline& pl, const Scenario& sc) {
  const EmbeddingParams& P = sc.params;
  if (!pl.carleson) {
    pl.report["summing"] = {{"regime", "unsupported"}, {"verdict", "inconclusive"},
                            {"error", "boundedness diagnostics unavailable"}};
    pl.decided = false;
    return;
  }
  if (!(P.p > 1.0)) {
    pl.report["summing"] = {{"regime", "unsupported"}, {"verdict", "inconclusive"},
                            {"error", "UNSUPPORTED_REGIME: summing diagnostics need p > 1"}};
    pl.decided = false;
    return;
  }
  try {
    SummingReport s = classify_summing(sc.weight, *sc.measure, P, *pl.partition, pl.wclass, *pl.carleson);
    reconcile(*pl.carleson, s, P.p, P.r);
    pl.report["summing"] = to_json(s);
    append_evidence(pl.csv, "summing", s.criterion);
    for (const auto& c : s.cross_statistics) append_evidence(pl.csv, "summing", c);
    if (s.verdict == SummingVerdict::Inconclusive) pl.decided = false;
    pl.report["invariants"] = {{"chain_holds", chain_holds(*pl.carleson, s, P.p, P.r)}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedRegime) throw;
    pl.report["summing"] = {{"regime", "unsupported"}, {"verdict", "inconclusive"}, {"error", e.what()}};
    pl.decided = false;
  }
}

void finish_carleson(Pipeline& pl) {
  if (!pl.carleson) return;
  pl.report["carleson"] = to_json(*pl.carleson);
  for (const auto& s : pl.carleson->statistics) append_evidence(pl.csv, "carleson", s);
  if (pl.carleson->bounded == Answer::Inconclusive) pl.decided = false;
}

void run_family(Pipeline& pl, const Scenario& sc) {
  if (sc.family.empty()) return;
  const double p = sc.params.p;
  const double q = sc.params.q;
  if (!(p > 1.0 && p < 2.0 && q > 1.0 && q <= 2.0)) {
    pl.report["equivalence"] = {{"error", "equivalence sweep needs 1 < p < 2 and 1 < q <= 2"}};
    pl.decided = false;
    return;
  }
  if (pl.wclass.in_dhat == Verdict::NonMember) {
    pl.report["equivalence"] = {{"error", "UNSUPPORTED: weight is not upper doubling"}};
    pl.decided = false;
    return;
  }
  if (!pl.partition) pl.partition = make_partition(sc.params);
  const auto rows = verify_equivalence(sc.weight, sc.family, sc.params, *pl.partition, pl.wclass);
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back({{"id", r.id},
                     {"stat_A", to_json(r.detail_a)},
                     {"stat_B", to_json(r.detail_b)},
                     {"transformed_bounded", verdict_word(r.transformed_bounded)},
                     {"agree_A", r.agree_a},
                     {"agree_B", r.agree_b},
                     {"agree", r.agree}});
    if (!r.agree) pl.decided = false;
  }
  pl.report["equivalence"] = table;
}

RunResult finish(Pipeline& pl) {
  RunResult out;
  out.exit_code = pl.decided ? 0 : 3;
  pl.report["exit_status"] = pl.decided ? "decided" : "inconclusive";
  out.report = std::move(pl.report);
  out.evidence_csv = pl.csv.str();
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  Pipeline pl;
  start(pl, sc);
  if (sc.measure) {
    run_carleson(pl, sc);
    run_summing(pl, sc);
    finish_carleson(pl);
  }
  run_family(pl, sc);
  return finish(pl);
}

RunResult diagnose_scenario(const Scenario& sc) {
  if (!sc.measure) throw Error(ErrorCode::ConfigInvalid, sc.origin + ": diagnose needs a \"measure\"");
  Pipeline pl;
  start(pl, sc);
  run_carleson(pl, sc);
  finish_carleson(pl);
  return finish(pl);
}

RunResult summing_scenario(const Scenario& sc) {
  if (!sc.measure) throw Error(ErrorCode::ConfigInvalid, sc.origin + ": summing needs a \"measure\"");
  Pipeline pl;
  start(pl, sc);
  run_carleson(pl, sc);
  run_summing(pl, sc);
  finish_carleson(pl);
  return finish(pl);
}

std::string equivalence_csv(const std::vector<EquivalenceRow>& rows) {
  std::ostringstream out;
  out << "member_id,stat_A,stat_B,transformed_bounded,agree\n";
  for (const auto& r : rows) {
    out << r.id << ',' << to_string(r.stat_a) << ',' << to_string(r.stat_b) << ',' << to_string(r.transformed_bounded)
        << ',' << (r.agree ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string lattice_csv(const Lattice& lattice) {
  std::ostringstream out;
  out << "index,re,im,abs\n";
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const DiskPoint a = lattice.centers[k];
    out << k << ',' << format_number(a.re) << ',' << format_number(a.im) << ',' << format_number(a.abs()) << '\n';
  }
  return out.str();
}

}  // namespace bergman
