#pragma once

#include "peakramp/model.hpp"

#include <initializer_list>

namespace fixtures {

using peakramp::ProsumerParams;
using peakramp::Scenario;
using peakramp::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// No flexibility at all: no elastic load, no storage, no renewable.
inline ProsumerParams rigid(const Vector& inelastic) {
  ProsumerParams p;
  p.inelastic = inelastic;
  p.renewable = Vector::Zero(inelastic.size());
  p.eff_charge = 0.9;
  p.eff_discharge = 0.9;
  return p;
}

/// Elastic plus renewable, no storage.
inline ProsumerParams grid_prosumer_a() {
  ProsumerParams p = rigid(vec({1.0, 2.0, 1.5}));
  p.renewable = vec({0.0, 0.8, 0.2});
  p.elastic_total = 0.9;
  p.elastic_min = 0.0;
  p.elastic_max = 0.6;
  return p;
}

/// Storage plus renewable, no elastic load.
inline ProsumerParams grid_prosumer_b() {
  ProsumerParams p = rigid(vec({0.5, 1.2, 0.4}));
  p.renewable = vec({0.3, 0.6, 0.0});
  p.charge_max = 0.3;
  p.discharge_max = 0.3;
  p.storage_cap = 0.4;
  p.storage_init = 0.2;
  return p;
}

/// The committed N=2, T=3 instance checked against the 0.05 kWh grid search.
inline Scenario grid_fixture() {
  Scenario sc;
  sc.horizon = 3;
  sc.prev_net_load = 1.5;
  sc.prosumers = {grid_prosumer_a(), grid_prosumer_b()};
  return sc;
}

/// A prosumer with every kind of flexibility over `horizon` slots.
inline ProsumerParams flexible(int horizon, double level, double solar_peak) {
  ProsumerParams p;
  p.inelastic = Vector::Constant(horizon, level);
  p.renewable = Vector::Zero(horizon);
  for (int t = horizon / 3; t < 2 * horizon / 3; ++t) p.renewable[t] = solar_peak;
  p.elastic_total = 0.3 * level * horizon;
  p.elastic_min = 0.0;
  p.elastic_max = 2.0 * p.elastic_total / horizon;
  p.charge_max = 0.5;
  p.discharge_max = 0.5;
  p.storage_cap = 2.0;
  p.storage_init = 0.5;
  p.eff_charge = 0.9;
  p.eff_discharge = 0.9;
  return p;
}

inline Scenario small_scenario(int prosumers, int horizon, double prev) {
  Scenario sc;
  sc.horizon = horizon;
  sc.prev_net_load = prev;
  for (int n = 0; n < prosumers; ++n)
    sc.prosumers.push_back(flexible(horizon, 1.0 + 0.2 * n, 0.8 + 0.1 * n));
  return sc;
}

}  // namespace fixtures
