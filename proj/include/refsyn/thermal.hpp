#pragma once

// RC-network building model: zones exchange heat through resistances,
// fixed-temperature nodes (outside air, supply water) act as boundary
// conditions, and every slab can switch its water loop on or off.

#include "refsyn/abstraction.hpp"

#include <map>
#include <string>
#include <vector>

namespace refsyn {

struct ThermalZone {
  std::string name;
  std::string type;          // free-form tag ("room-a", "slab", ...)
  double capacitance = 1.0;  // c_i
  double gain = 0.0;         // k_i, constant heat input
  bool slab = false;         // has a switchable water loop
  double water_resistance = 0.0;
};

struct ThermalLink {
  std::string a, b; // zone or fixed-node names
  double resistance = 1.0;
};

struct ThermalConfig {
  double tau = 1.0; // Euler step
  std::vector<ThermalZone> zones;
  std::map<std::string, double> fixed; // node name -> temperature
  std::string water_node = "water";
  std::vector<ThermalLink> links;
  Box domain;                     // one axis per zone, in zone order
  std::vector<std::size_t> grid;  // initial cells per axis
  /// Additive heat disturbance per zone (empty box: none).
  Box disturbance;
  std::map<std::string, Box> propositions;

  void validate() const;
  std::size_t slab_count() const;
};

/// One mode per on/off slab pattern; bit s of the mode index switches the
/// s-th slab (in zone order) on.
std::vector<AffineMode> thermal_modes(const ThermalConfig &cfg);

/// Domain, grid, modes, disturbance and propositions bundled for Abstraction.
System thermal_system(const ThermalConfig &cfg);

} // namespace refsyn
