#include "turnpike/report.hpp"

#include <iomanip>

namespace turnpike {

Json to_json(const Point& p) {
  Json j = Json::array();
  for (double v : p) j.push_back(v);
  return j;
}

Json to_json(const PointSet& points) {
  Json j = Json::array();
  for (const Point& p : points) j.push_back(p.size() == 1 ? Json(p[0]) : to_json(p));
  return j;
}

Json to_json(const IndexSet& set, std::size_t max_items) {
  Json items = Json::array();
  for (std::size_t i = 0; i < set.size() && i < max_items; ++i) items.push_back(set.indices()[i]);
  return Json{{"size", set.size()}, {"horizon", set.horizon()}, {"first", std::move(items)}};
}

Json to_json(const ClusterReport& r) {
  Json j;
  j["ideal"] = r.ideal;
  j["horizon"] = r.horizon;
  j["cluster_points"] = to_json(r.cluster_points);
  j["liminf"] = r.liminf ? Json(*r.liminf) : Json(nullptr);
  j["limsup"] = r.limsup ? Json(*r.limsup) : Json(nullptr);
  j["limit"] = r.converges_to ? to_json(*r.converges_to) : Json(nullptr);
  j["classical_min"] = to_json(r.window_min);
  j["classical_max"] = to_json(r.window_max);
  j["thresholds"] = {{"eps_grid", r.eps_grid},
                     {"theta", r.theta},
                     {"limit_eps", r.limit_eps},
                     {"burn_in", r.burn_in},
                     {"horizon", r.horizon}};
  return j;
}

Json to_json(const OptimReport& r, const SearchConfig& cfg) {
  Json j;
  j["objective"] = r.objective;
  j["path_min"] = r.path_min;
  j["length"] = r.best.size();
  j["final_state"] = r.best.states.empty() ? Json(nullptr) : to_json(r.best.states.back());
  j["trace"] = r.best.trace;
  j["exhaustive"] = r.exhaustive;
  j["partial"] = r.partial;
  if (!r.note.empty()) j["note"] = r.note;
  std::size_t peak = 0;
  for (std::size_t f : r.frontier_sizes) peak = std::max(peak, f);
  j["frontier_peak"] = peak;
  j["thresholds"] = {{"horizon", cfg.horizon}, {"beam", cfg.beam},     {"grid", cfg.grid},
                     {"trim", r.trim},         {"tail_start", r.tail_start},
                     {"discarded", r.discarded}, {"seed", cfg.seed}};
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j = Json::object();
  for (const auto& c : r.conditions) {
    Json cj;
    cj["verdict"] = to_string(c.verdict);
    cj["detail"] = c.detail;
    cj["residual"] = c.residual;
    cj["threshold"] = c.threshold;
    if (!c.witnesses.empty()) cj["witnesses"] = to_json(c.witnesses);
    if (c.witness_set) cj["witness_set"] = to_json(*c.witness_set);
    j[c.name] = std::move(cj);
  }
  j["all_pass"] = r.all_pass();
  return j;
}

Json to_json(const SeparationReport& r) {
  const auto pair_json = [](const std::optional<std::pair<Point, Point>>& w) {
    return w ? Json{{"x", to_json(w->first)}, {"y", to_json(w->second)}} : Json(nullptr);
  };
  return Json{{"strong_holds", r.strong_holds},
              {"weak_holds", r.weak_holds},
              {"weak_only", r.flagged},
              {"pairs", r.pairs},
              {"strong_witness", pair_json(r.strong_witness)},
              {"weak_witness", pair_json(r.weak_witness)}};
}

Json to_json(const TurnpikeVerdict& v) {
  Json rungs = Json::array();
  for (const auto& r : v.rungs) {
    rungs.push_back({{"eps", r.eps}, {"density", r.density}, {"count", r.count}, {"small", r.small}});
  }
  return Json{{"target", to_json(v.target)},
              {"ideal", v.ideal},
              {"verdict", v.verdict},
              {"rungs", std::move(rungs)},
              {"thresholds", {{"burn_in", v.burn_in}, {"horizon", v.horizon}}}};
}

Json to_json(const ContinuityReport& r) {
  Json rungs = Json::array();
  for (const auto& rung : r.rungs) {
    rungs.push_back({{"delta", rung.delta}, {"max_ratio", rung.max_ratio}});
  }
  return Json{{"passed", r.passed},
              {"probes", r.probes},
              {"skipped_infeasible", r.skipped_infeasible},
              {"rungs", std::move(rungs)}};
}

Json to_json(const HutchinsonResult& r) {
  double lo = 0.0;
  double hi = 0.0;
  if (!r.set.empty() && r.set.front().size() == 1) {
    lo = r.set.front()[0];
    hi = r.set.back()[0];
  }
  return Json{{"points", r.set.size()},
              {"min", lo},
              {"max", hi},
              {"step_distances", r.step_distances},
              {"max_lipschitz", r.max_lipschitz},
              {"thresholds", {{"resolution", r.resolution}}}};
}

void write_path_csv(std::ostream& os, const SequenceWindow& path, const ScalarMap& u,
                    const std::optional<Point>& eta_star) {
  const std::size_t d = path.dimension();
  os << "n";
  for (std::size_t i = 0; i < d; ++i) os << ",x_" << i;
  os << ",u,dist_to_eta_star\n";
  os << std::setprecision(17);
  for (std::size_t n = 0; n < path.size(); ++n) {
    const auto x = path[n];
    os << n;
    for (double v : x) os << ',' << v;
    os << ',' << u(x) << ',';
    if (eta_star) os << distance(x, *eta_star);
    os << '\n';
  }
}

}  // namespace turnpike
