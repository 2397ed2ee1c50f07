#include "turnpike/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "turnpike/error.hpp"
#include "turnpike/report.hpp"
#include "turnpike/scenarios.hpp"

namespace turnpike {

namespace {

const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> keys = {
      {"command", "run"},     {"scenario", "run"},      {"input", "run"},
      {"ideal", "run"},       {"horizon", "run"},       {"seed", "run"},
      {"output", "run"},      {"out_dir", "run"},       {"beam", "search"},
      {"trim", "search"},     {"grid", "search"},       {"theta", "analysis"},
      {"eps", "analysis"},    {"k_max", "scenario"},    {"dim", "scenario"},
      {"branches", "scenario"}};
  return keys;
}

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out)) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is out of range: " + v);
  }
}

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
  const auto it = key_sections().find(key);
  if (it == key_sections().end()) throw ConfigError("unknown config key '" + key + "'");
  if (!section.empty() && it->second != section) {
    throw ConfigError("config key '" + key + "' does not belong in section [" + section + "]");
  }
  if (key == "command") cfg.command = value;
  else if (key == "scenario") cfg.scenario = value;
  else if (key == "input") cfg.input = value;
  else if (key == "ideal") cfg.ideal = value;
  else if (key == "horizon") cfg.horizon = to_unsigned(key, value);
  else if (key == "seed") cfg.seed = to_unsigned(key, value);
  else if (key == "output") cfg.output = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "beam") cfg.beam = to_unsigned(key, value);
  else if (key == "trim") cfg.trim = to_double(key, value);
  else if (key == "grid") cfg.grid = to_double(key, value);
  else if (key == "theta") cfg.theta = to_double(key, value);
  else if (key == "eps") cfg.eps = to_double(key, value);
  else if (key == "k_max") cfg.k_max = static_cast<int>(to_unsigned(key, value));
  else if (key == "dim") cfg.dim = to_unsigned(key, value);
  else if (key == "branches") cfg.branches = value;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("config key '" + key + "' must be a string or number");
}

struct ScenarioDefaults {
  std::string ideal;
  std::size_t horizon;
  std::size_t beam;
};

ScenarioDefaults defaults_for(const std::string& scenario) {
  if (scenario == "counterexample") return {"finite-trace:auto", 4096, 64};
  if (scenario == "blocks") return {"density:0.01", 4096, 64};
  if (scenario == "ifs") return {"fin", 200, 64};
  if (scenario == "l2") return {"density:0.01", 10000, 16};
  if (scenario == "separation") return {"density:0.01", 4096, 64};
  throw ConfigError("unknown scenario '" + scenario +
                    "' (expected counterexample, blocks, ifs, l2 or separation)");
}

std::vector<AffineMap> parse_branches(const std::string& text) {
  std::vector<AffineMap> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_ws(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("branch '" + item + "' must be written slope:offset");
    }
    out.push_back({to_double("branches", trim_ws(item.substr(0, colon))),
                   to_double("branches", trim_ws(item.substr(colon + 1)))});
  }
  if (out.empty()) throw ConfigError("'branches' lists no maps");
  return out;
}

double identity_utility(std::span<const double> x) { return x[0]; }

struct Resolved {
  RunConfig cfg;
  ScenarioDefaults defaults;
  std::size_t horizon;
  std::string ideal_spec;
};

Resolved resolve(const RunConfig& cfg) {
  Resolved r{cfg, {"density:0.01", 0, 64}, 0, cfg.ideal};
  if (!cfg.scenario.empty()) r.defaults = defaults_for(cfg.scenario);
  r.horizon = cfg.horizon.value_or(r.defaults.horizon);
  if (r.ideal_spec.empty()) r.ideal_spec = r.defaults.ideal;
  return r;
}

IdealModel make_ideal(const std::string& spec, std::size_t horizon) {
  return IdealModel::parse(spec, horizon, Parity::Evens);
}

SystemInstance make_system(const Resolved& r, const IdealModel& ideal) {
  const std::string& s = r.cfg.scenario;
  if (s == "counterexample") return build_counterexample_system(ideal, r.horizon);
  if (s == "blocks") return build_blocks_system(ideal, r.horizon);
  if (s == "ifs") {
    const std::string text = r.cfg.branches.empty() ? "0.5:0,0.3:0.7" : r.cfg.branches;
    return build_ifs_system(parse_branches(text), identity_utility, ideal, 0.0, r.horizon);
  }
  if (s == "l2") {
    const std::size_t d = r.cfg.dim.value_or(8);
    if (d < 2 || d > 8) throw ConfigError("l2 dimension must lie in [2, 8]");
    return build_l2_truncation(d, seeded_l2_start(d, r.cfg.seed), ideal, r.horizon);
  }
  if (s == "separation") return build_separation_instance(ideal);
  throw ConfigError("unknown scenario '" + s + "'");
}

SearchConfig search_config(const Resolved& r) {
  SearchConfig sc;
  sc.horizon = r.horizon;
  sc.beam = r.cfg.beam.value_or(r.defaults.beam);
  sc.trim = r.cfg.trim.value_or(0.01);
  sc.grid = r.cfg.grid.value_or(1e-9);
  sc.seed = r.cfg.seed;
  sc.validate();
  return sc;
}

Json config_json(const Resolved& r) {
  const RunConfig& c = r.cfg;
  Json j;
  j["command"] = c.command;
  j["scenario"] = c.scenario.empty() ? Json(nullptr) : Json(c.scenario);
  j["input"] = c.input.empty() ? Json(nullptr) : Json(c.input);
  j["ideal"] = r.ideal_spec;
  j["horizon"] = r.horizon;
  j["beam"] = c.beam.value_or(r.defaults.beam);
  j["trim"] = c.trim.value_or(0.01);
  j["grid"] = c.grid ? Json(*c.grid) : Json(nullptr);
  j["theta"] = c.theta.value_or(0.05);
  j["eps"] = c.eps ? Json(*c.eps) : Json(nullptr);
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["k_max"] = c.k_max ? Json(*c.k_max) : Json(nullptr);
  j["dim"] = c.dim ? Json(*c.dim) : Json(nullptr);
  j["branches"] = c.branches.empty() ? Json(nullptr) : Json(c.branches);
  return j;
}

struct Check {
  std::string name;
  std::string expected;
  std::string observed;
  bool pass = false;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class Outcome {
 public:
  void add(std::string name, std::string expected, std::string observed, bool pass) {
    checks_.push_back({std::move(name), std::move(expected), std::move(observed), pass});
  }
  bool pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
  }
  Json json() const {
    Json arr = Json::array();
    for (const auto& c : checks_) {
      arr.push_back({{"name", c.name},
                     {"expected", c.expected},
                     {"observed", c.observed},
                     {"pass", c.pass}});
    }
    return arr;
  }
  void print(std::ostream& out) const {
    for (const auto& c : checks_) {
      out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.observed
          << " (expected " << c.expected << ")\n";
    }
  }

 private:
  std::vector<Check> checks_;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_outputs(const Resolved& r, const std::string& stem, const Json& report,
                   const std::function<void(std::ostream&)>& csv, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path dir(r.cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const bool want_json = r.cfg.output == "json" || r.cfg.output == "both";
  const bool want_csv = r.cfg.output == "csv" || r.cfg.output == "both";
  if (want_json) {
    const fs::path path = dir / (stem + ".json");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << report.dump(2) << '\n';
    std::ofstream meta(dir / (stem + ".meta.json"));
    meta << Json{{"report", path.filename().string()}, {"generated_at", utc_now()}}.dump(2) << '\n';
    out << "report: " << path.string() << '\n';
  }
  if (want_csv && csv) {
    const fs::path path = dir / (stem + ".csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    csv(os);
    out << "table: " << path.string() << '\n';
  }
}

Json base_report(const Resolved& r) {
  Json j;
  j["command"] = r.cfg.command;
  j["config"] = config_json(r);
  return j;
}

std::string stem_for(const Resolved& r) {
  if (!r.cfg.scenario.empty()) return r.cfg.command + "_" + r.cfg.scenario;
  return r.cfg.command + "_" + std::filesystem::path(r.cfg.input).stem().string();
}

// ---- analyze ---------------------------------------------------------------

int run_analyze(const Resolved& r, std::ostream& out) {
  SequenceWindow window = [&] {
    if (!r.cfg.input.empty()) return read_window_file(r.cfg.input);
    if (r.cfg.scenario == "blocks") return build_block_sequence(r.cfg.k_max.value_or(10));
    throw ConfigError("analyze needs --input or the blocks scenario");
  }();
  const std::string spec = r.cfg.ideal.empty()
                               ? (r.cfg.scenario.empty() ? std::string("density:0.01") : r.ideal_spec)
                               : r.cfg.ideal;
  const IdealModel ideal = make_ideal(spec, window.size());
  AnalysisOptions opts;
  opts.eps_grid = r.cfg.grid.value_or(0.0);
  opts.theta = r.cfg.theta.value_or(0.05);
  const double eps = r.cfg.eps.value_or(0.1);
  const ClusterReport cr = analyze_window(window, ideal, eps, opts);

  Json report = base_report(r);
  report["config"]["ideal"] = spec;
  report["config"]["horizon"] = window.size();
  report["analysis"] = to_json(cr);
  if (cr.converges_to) {
    report["limit_check"] = to_json(turnpike_verdict(window, *cr.converges_to, ideal, {eps}));
  }
  report["status"] = "pass";

  out << "ideal " << ideal.describe() << ", N = " << window.size() << ", "
      << cr.cluster_points.size() << " cluster point(s)";
  if (cr.liminf) out << ", liminf " << num(*cr.liminf) << ", limsup " << num(*cr.limsup);
  out << ", limit " << (cr.converges_to ? to_json(*cr.converges_to).dump() : "none") << '\n';

  const std::optional<Point> eta = cr.converges_to;
  write_outputs(r, stem_for(r), report,
                [&](std::ostream& os) { write_path_csv(os, window, identity_utility, eta); }, out);
  return kExitPass;
}

// ---- optimize --------------------------------------------------------------

int run_optimize(const Resolved& r, std::ostream& out) {
  if (r.cfg.scenario.empty()) throw ConfigError("optimize needs a scenario");
  const IdealModel ideal = make_ideal(r.ideal_spec, r.horizon);
  const SystemInstance sys = make_system(r, ideal);
  const SearchConfig sc = search_config(r);
  const OptimReport best = maxmin_search(sys, sc);

  Json report = base_report(r);
  report["optimizer"] = to_json(best, sc);
  bool pass = !best.partial;
  if (sys.eta_star) {
    const TurnpikeVerdict v = turnpike_verdict(best.best.window(), *sys.eta_star, ideal);
    report["turnpike"] = to_json(v);
    pass = pass && v.verdict;
    out << "turnpike verdict " << (v.verdict ? "true" : "false") << '\n';
  }
  report["status"] = pass ? "pass" : "fail";
  out << "objective " << num(best.objective) << " over " << best.best.size() << " states ("
      << ideal.describe() << ")\n";
  const SequenceWindow path = best.best.window();
  write_outputs(r, stem_for(r), report,
                [&](std::ostream& os) { write_path_csv(os, path, sys.u, sys.eta_star); }, out);
  return pass ? kExitPass : kExitFail;
}

// ---- verify ----------------------------------------------------------------

int run_verify(const Resolved& r, std::ostream& out) {
  if (r.cfg.scenario.empty()) throw ConfigError("verify needs a scenario");
  const IdealModel ideal = make_ideal(r.ideal_spec, r.horizon);
  const SystemInstance sys = make_system(r, ideal);
  SamplingPlan plan;
  plan.seed = r.cfg.seed;
  const ConditionReport cond = check_conditions(sys, plan);
  Json report = base_report(r);
  report["conditions"] = to_json(cond);
  if (sys.t && sys.eta_star) report["separation"] = to_json(check_separation_variants(sys, plan));
  report["thresholds"] = {{"probes", plan.probes}, {"tol", plan.tol}, {"seed", plan.seed}};
  report["status"] = cond.all_pass() ? "pass" : "fail";
  for (const auto& c : cond.conditions) {
    out << c.name << ' ' << to_string(c.verdict) << ": " << c.detail << '\n';
  }
  write_outputs(r, stem_for(r), report, nullptr, out);
  return cond.all_pass() ? kExitPass : kExitFail;
}

// ---- reproduce -------------------------------------------------------------

void reproduce_blocks(const Resolved& r, Json& report, Outcome& o, SequenceWindow& path_out) {
  const int k_max = r.cfg.k_max.value_or(10);
  const SequenceWindow x = build_block_sequence(k_max);
  const IdealModel ideal = make_ideal(r.ideal_spec, x.size());
  const double eps = r.cfg.eps.value_or(0.1);
  AnalysisOptions opts;
  opts.theta = r.cfg.theta.value_or(0.05);
  const ClusterReport cr = analyze_window(x, ideal, eps, opts);
  const TurnpikeVerdict v = turnpike_verdict(x, {0.0}, ideal, {eps});
  const ClusterReport fin = analyze_window(x, IdealModel::fin(x.size()), eps, opts);
  report["analysis"] = to_json(cr);
  report["limit_check"] = to_json(v);
  report["fin_analysis"] = to_json(fin);
  const bool limit_zero = cr.converges_to && std::abs((*cr.converges_to)[0]) <= cr.eps_grid;
  o.add("ideal limit", "0", cr.converges_to ? num((*cr.converges_to)[0]) : "none", limit_zero);
  o.add("deviation density at eps", "<= 0.02", num(v.rungs[0].density),
        v.verdict && v.rungs[0].density <= 0.02);
  o.add("classical min", "-1", num(cr.window_min[0]), cr.window_min[0] == -1.0);
  o.add("classical max", "1", num(cr.window_max[0]), cr.window_max[0] == 1.0);
  o.add("fin limit", "none", fin.converges_to ? num((*fin.converges_to)[0]) : "none",
        !fin.converges_to);
  path_out = x;
}

void reproduce_counterexample(const Resolved& r, Json& report, Outcome& o, Path& path_out) {
  const IdealModel ideal = make_ideal(r.ideal_spec, r.horizon);
  const SystemInstance sys = make_system(r, ideal);
  const SearchConfig sc = search_config(r);
  const OptimReport best = maxmin_search(sys, sc);
  const TurnpikeVerdict v = turnpike_verdict(best.best.window(), {0.0}, ideal);
  SamplingPlan plan;
  plan.seed = r.cfg.seed;
  const ConditionReport cond = check_conditions(sys, plan);
  report["optimizer"] = to_json(best, sc);
  report["turnpike"] = to_json(v);
  report["conditions"] = to_json(cond);
  if (ideal.kind() == IdealKind::FiniteTrace) {
    bool alternating = true;
    for (std::size_t n = 0; n < best.best.size(); ++n) {
      alternating = alternating && best.best.states[n][0] == (n % 2 == 0 ? 1.0 : -1.0);
    }
    o.add("objective", ">= 1 - 1e-9", num(best.objective), best.objective >= 1.0 - 1e-9);
    o.add("optimal path", "alternating", alternating ? "alternating" : "other", alternating);
    o.add("turnpike verdict", "false", v.verdict ? "true" : "false", !v.verdict);
    o.add("A3", "fail", to_string(cond.at("A3").verdict), cond.at("A3").verdict == Verdict::Fail);
  } else {
    o.add("objective", "<= 1e-3", num(best.objective), best.objective <= 1e-3);
    o.add("turnpike verdict", "true", v.verdict ? "true" : "false", v.verdict);
    for (const auto& c : cond.conditions) {
      o.add(c.name, "pass", to_string(c.verdict), c.verdict == Verdict::Pass);
    }
  }
  path_out = best.best;
}

void reproduce_ifs(const Resolved& r, Json& report, Outcome& o, Path& path_out) {
  const IdealModel ideal = make_ideal(r.ideal_spec, std::max<std::size_t>(r.horizon, 130));
  const SystemInstance sys = make_system(r, ideal);
  const std::string text = r.cfg.branches.empty() ? "0.5:0,0.3:0.7" : r.cfg.branches;
  const auto maps = parse_branches(text);
  PointSet expected;
  for (const auto& m : maps) expected.push_back({m.offset / (1.0 - m.slope)});
  expected = deduplicate(expected, 1e-8);
  const PointSet fixed = fixed_points(sys.phi, sys.probe_box);
  const double fp_gap = fixed.empty() ? INFINITY : hausdorff(fixed, expected);
  o.add("fixed points", to_json(expected).dump(), to_json(fixed).dump(), fp_gap <= 1e-8);

  SearchConfig sc = search_config(r);
  const OptimReport best = maxmin_search(sys, sc);
  const double gap = distance(best.best.states.back(), *sys.eta_star);
  const TurnpikeVerdict v = turnpike_verdict(best.best.window(), *sys.eta_star, ideal);
  o.add("final state gap", "<= 1e-6", num(gap), gap <= 1e-6);
  o.add("turnpike verdict", "true", v.verdict ? "true" : "false", v.verdict);

  const auto& fb = std::get<FiniteBranch>(sys.phi.variant());
  const HutchinsonResult h = hutchinson_iterate(fb, {0.0}, 30);
  report["fixed_points"] = to_json(fixed);
  report["eta_star"] = to_json(*sys.eta_star);
  report["optimizer"] = to_json(best, sc);
  report["turnpike"] = to_json(v);
  report["attractor"] = to_json(h);
  path_out = best.best;
}

void reproduce_l2(const Resolved& r, Json& report, Outcome& o, Path& path_out) {
  const IdealModel ideal = make_ideal(r.ideal_spec, r.horizon);
  const SystemInstance sys = make_system(r, ideal);
  SamplingPlan plan;
  plan.seed = r.cfg.seed;
  const ConditionReport cond = check_conditions(sys, plan);
  for (const auto& c : cond.conditions) {
    o.add(c.name, "pass", to_string(c.verdict), c.verdict == Verdict::Pass);
  }
  const double at_zero = t_hat(sys, *sys.eta_star);
  o.add("T-hat at eta_star", "0", num(at_zero), at_zero == 0.0);

  std::mt19937_64 rng(plan.seed ^ 0x7e);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t probed = 0;
  double worst = -INFINITY;
  while (probed < plan.probes) {
    Point x(sys.dimension);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = sys.probe_box.lo[i] + (sys.probe_box.hi[i] - sys.probe_box.lo[i]) * unit(rng);
    }
    if (!sys.in_f(x) || x == *sys.eta_star) continue;
    worst = std::max(worst, t_hat(sys, x));
    ++probed;
  }
  o.add("max T-hat on F \\ {eta_star}", "< 0", num(worst), worst < 0.0);

  const SearchConfig sc = search_config(r);
  const OptimReport best = maxmin_search(sys, sc);
  const double eps = r.cfg.eps.value_or(1e-3);
  const TurnpikeVerdict v = turnpike_verdict(best.best.window(), *sys.eta_star, ideal, {eps});
  o.add("turnpike verdict", "true", v.verdict ? "true" : "false", v.verdict);
  report["x_star"] = to_json(sys.start);
  report["conditions"] = to_json(cond);
  report["separation"] = to_json(check_separation_variants(sys, plan));
  report["optimizer"] = to_json(best, sc);
  report["turnpike"] = to_json(v);
  path_out = best.best;
}

void reproduce_separation(const Resolved& r, Json& report, Outcome& o) {
  const IdealModel ideal = make_ideal(r.ideal_spec, r.horizon);
  SamplingPlan plan;
  plan.seed = r.cfg.seed;
  const SeparationReport crafted = check_separation_variants(build_separation_instance(ideal), plan);
  const SeparationReport example =
      check_separation_variants(build_counterexample_system(ideal, r.horizon), plan);
  o.add("crafted weak variant", "holds", crafted.weak_holds ? "holds" : "fails", crafted.weak_holds);
  const bool witness = crafted.strong_witness && crafted.strong_witness->first == Point{0.0} &&
                       crafted.strong_witness->second == Point{1.0};
  o.add("crafted strong variant", "fails at (0, 1)",
        crafted.strong_holds ? "holds"
                             : "fails at (" + num(crafted.strong_witness->first[0]) + ", " +
                                   num(crafted.strong_witness->second[0]) + ")",
        !crafted.strong_holds && witness);
  o.add("counterexample variants", "both hold",
        example.strong_holds && example.weak_holds ? "both hold" : "violated",
        example.strong_holds && example.weak_holds);
  report["crafted"] = to_json(crafted);
  report["counterexample"] = to_json(example);
}

int run_reproduce(const Resolved& r, std::ostream& out) {
  if (r.cfg.scenario.empty()) throw ConfigError("reproduce needs a scenario");
  Json report = base_report(r);
  Outcome o;
  std::optional<SequenceWindow> table;
  std::optional<SystemInstance> sys;
  const std::string& s = r.cfg.scenario;
  if (s == "blocks") {
    SequenceWindow x = SequenceWindow::scalar({0.0});
    reproduce_blocks(r, report, o, x);
    report["config"]["k_max"] = r.cfg.k_max.value_or(10);
    table = std::move(x);
  } else if (s == "separation") {
    reproduce_separation(r, report, o);
  } else {
    Path p;
    if (s == "counterexample") reproduce_counterexample(r, report, o, p);
    if (s == "ifs") reproduce_ifs(r, report, o, p);
    if (s == "l2") reproduce_l2(r, report, o, p);
    table = p.window();
    sys = make_system(r, make_ideal(r.ideal_spec, std::max<std::size_t>(r.horizon, 130)));
  }
  report["checks"] = o.json();
  report["status"] = o.pass() ? "pass" : "fail";
  o.print(out);
  const std::optional<Point> eta = sys ? sys->eta_star : std::optional<Point>(Point{0.0});
  const ScalarMap u = sys ? sys->u : ScalarMap(identity_utility);
  write_outputs(r, stem_for(r), report,
                table ? std::function<void(std::ostream&)>(
                            [&](std::ostream& os) { write_path_csv(os, *table, u, eta); })
                      : nullptr,
                out);
  return o.pass() ? kExitPass : kExitFail;
}

}  // namespace

void apply_config_text(const std::string& text, RunConfig& cfg) {
  const std::string body = trim_ws(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed JSON config: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [inner, v] : value.items()) set_key(cfg, key, inner, json_scalar(v, inner));
      } else {
        set_key(cfg, "", key, json_scalar(value, key));
      }
    }
    return;
  }
  std::istringstream is(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim_ws(line.substr(1, line.size() - 2));
      if (section != "run" && section != "search" && section != "analysis" && section != "scenario") {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string value = trim_ws(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    set_key(cfg, section, trim_ws(line.substr(0, eq)), value);
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  apply_config_text(ss.str(), cfg);
}

void validate(const RunConfig& cfg) {
  if (cfg.command != "analyze" && cfg.command != "optimize" && cfg.command != "verify" &&
      cfg.command != "reproduce") {
    throw ConfigError("unknown command '" + cfg.command +
                      "' (expected analyze, optimize, verify or reproduce)");
  }
  if (cfg.output != "json" && cfg.output != "csv" && cfg.output != "both") {
    throw ConfigError("output must be json, csv or both");
  }
  if (!cfg.scenario.empty()) defaults_for(cfg.scenario);
  if (!cfg.scenario.empty() && !cfg.input.empty()) {
    throw ConfigError("give either a scenario or an input file, not both");
  }
  if (cfg.k_max && cfg.scenario != "blocks") throw ConfigError("k_max applies to the blocks scenario");
  if (cfg.dim && cfg.scenario != "l2") throw ConfigError("dim applies to the l2 scenario");
  if (!cfg.branches.empty() && cfg.scenario != "ifs") {
    throw ConfigError("branches applies to the ifs scenario");
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    const Resolved r = resolve(cfg);
    if (cfg.command == "analyze") return run_analyze(r, out);
    if (cfg.command == "optimize") return run_optimize(r, out);
    if (cfg.command == "verify") return run_verify(r, out);
    return run_reproduce(r, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace turnpike
