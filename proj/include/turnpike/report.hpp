#pragma once

#include <optional>
#include <ostream>

#include "json.hpp"

#include "turnpike/cluster.hpp"
#include "turnpike/optimizer.hpp"
#include "turnpike/verifier.hpp"

namespace turnpike {

using Json = nlohmann::ordered_json;

Json to_json(const Point& p);
Json to_json(const PointSet& points);
Json to_json(const IndexSet& set, std::size_t max_items = 64);
Json to_json(const ClusterReport& r);
Json to_json(const OptimReport& r, const SearchConfig& cfg);
Json to_json(const ConditionReport& r);
Json to_json(const SeparationReport& r);
Json to_json(const TurnpikeVerdict& v);
Json to_json(const ContinuityReport& r);
Json to_json(const HutchinsonResult& r);

/// Columns n, x_0..x_{d-1}, u, dist_to_eta_star (blank without eta_star).
void write_path_csv(std::ostream& os, const SequenceWindow& path, const ScalarMap& u,
                    const std::optional<Point>& eta_star);

}  // namespace turnpike
