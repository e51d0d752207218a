#include "refsyn/thermal.hpp"

#include "refsyn/error.hpp"

#include <cmath>
#include <set>

namespace refsyn {

std::size_t ThermalConfig::slab_count() const {
  std::size_t n = 0;
  for (const auto &z : zones)
    n += z.slab ? 1 : 0;
  return n;
}

void ThermalConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw ConfigError("thermal: tau must be positive");
  if (zones.empty())
    throw ConfigError("thermal: at least one zone is required");
  std::set<std::string> names;
  for (const auto &z : zones) {
    if (!names.insert(z.name).second)
      throw ConfigError("thermal: duplicate node name '" + z.name + "'");
    if (!(z.capacitance > 0.0))
      throw ConfigError("thermal: zone '" + z.name + "' needs capacitance > 0");
    if (z.slab && !(z.water_resistance > 0.0))
      throw ConfigError("thermal: slab '" + z.name + "' needs water_resistance > 0");
  }
  for (const auto &[name, t] : fixed) {
    if (!names.insert(name).second)
      throw ConfigError("thermal: duplicate node name '" + name + "'");
    if (!std::isfinite(t))
      throw ConfigError("thermal: fixed node '" + name + "' has no finite temperature");
  }
  if (slab_count() > 0 && !fixed.count(water_node))
    throw ConfigError("thermal: slabs present but water node '" + water_node +
                      "' is not a fixed node");
  if (slab_count() > 16)
    throw ConfigError("thermal: too many slabs");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &l : links) {
    if (!names.count(l.a) || !names.count(l.b))
      throw ConfigError("thermal: link " + l.a + "-" + l.b + " names an unknown node");
    if (l.a == l.b)
      throw ConfigError("thermal: link connects '" + l.a + "' to itself");
    if (!(l.resistance > 0.0))
      throw ConfigError("thermal: link " + l.a + "-" + l.b + " needs resistance > 0");
    auto key = std::minmax(l.a, l.b);
    if (!seen.insert({key.first, key.second}).second)
      throw ConfigError("thermal: link " + l.a + "-" + l.b + " given twice");
  }
  if (domain.dim() != zones.size())
    throw ConfigError("thermal: domain needs one axis per zone");
  if (disturbance.dim() != 0 && disturbance.dim() != zones.size())
    throw ConfigError("thermal: disturbance needs one interval per zone");
}

std::vector<AffineMode> thermal_modes(const ThermalConfig &cfg) {
  cfg.validate();
  const std::size_t n = cfg.zones.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i)
    index[cfg.zones[i].name] = i;

  // conductance to free zones and to fixed nodes, shared by all modes
  std::vector<double> g(n * n, 0.0);
  std::vector<double> g_fixed(n, 0.0), heat_fixed(n, 0.0);
  auto connect_fixed = [&](std::size_t i, double temp, double r) {
    g_fixed[i] += 1.0 / r;
    heat_fixed[i] += temp / r;
  };
  for (const auto &l : cfg.links) {
    const bool fa = index.count(l.a) > 0, fb = index.count(l.b) > 0;
    if (fa && fb) {
      const std::size_t i = index[l.a], j = index[l.b];
      g[i * n + j] += 1.0 / l.resistance;
      g[j * n + i] += 1.0 / l.resistance;
    } else if (fa) {
      connect_fixed(index[l.a], cfg.fixed.at(l.b), l.resistance);
    } else if (fb) {
      connect_fixed(index[l.b], cfg.fixed.at(l.a), l.resistance);
    }
  }

  std::vector<std::size_t> slabs;
  for (std::size_t i = 0; i < n; ++i)
    if (cfg.zones[i].slab)
      slabs.push_back(i);
  const std::size_t n_dist = cfg.disturbance.dim();
  const std::size_t n_modes = std::size_t{1} << slabs.size();

  std::vector<AffineMode> modes;
  for (std::size_t u = 0; u < n_modes; ++u) {
    std::vector<double> gf = g_fixed, hf = heat_fixed;
    for (std::size_t s = 0; s < slabs.size(); ++s)
      if ((u >> s) & 1U) {
        const auto &z = cfg.zones[slabs[s]];
        gf[slabs[s]] += 1.0 / z.water_resistance;
        hf[slabs[s]] += cfg.fixed.at(cfg.water_node) / z.water_resistance;
      }
    AffineMode m;
    m.dim = n;
    m.dist_dim = n_dist;
    m.a.assign(n * n, 0.0);
    m.k.assign(n, 0.0);
    m.e.assign(n * n_dist, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = cfg.tau / cfg.zones[i].capacitance;
      double total = gf[i];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          m.a[i * n + j] = h * g[i * n + j];
          total += g[i * n + j];
        }
      m.a[i * n + i] = 1.0 - h * total;
      if (m.a[i * n + i] < 0.0)
        throw ConfigError("thermal: tau too large for zone '" + cfg.zones[i].name +
                          "' (negative self coefficient)");
      m.k[i] = h * (hf[i] + cfg.zones[i].gain);
      if (n_dist > 0)
        m.e[i * n_dist + i] = h;
    }
    modes.push_back(std::move(m));
  }
  return modes;
}

System thermal_system(const ThermalConfig &cfg) {
  System sys;
  sys.modes = thermal_modes(cfg);
  sys.domain = cfg.domain;
  sys.grid = cfg.grid;
  sys.disturbance = cfg.disturbance;
  sys.propositions = cfg.propositions;
  for (const auto &z : cfg.zones)
    sys.axis_names.push_back(z.name);
  sys.validate();
  return sys;
}

} // namespace refsyn
