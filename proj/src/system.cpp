#include "turnpike/system.hpp"

#include "turnpike/error.hpp"

namespace turnpike {

double SystemInstance::apply_t(std::span<const double> x) const {
  if (!t) throw ConfigError("system '" + name + "' has no separation functional T");
  if (t->size() != x.size()) throw ConfigError("T and state dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (*t)[i] * x[i];
  return s;
}

bool SystemInstance::in_f(std::span<const double> x) const {
  if (!eta_star) throw ConfigError("system '" + name + "' has no eta_star");
  return u(x) >= u(*eta_star);
}

double stationarity_residual(const SystemInstance& sys) {
  if (!sys.eta_star) throw ConfigError("system '" + sys.name + "' has no eta_star");
  return sys.phi.distance_to_image(*sys.eta_star, *sys.eta_star);
}

}  // namespace turnpike
