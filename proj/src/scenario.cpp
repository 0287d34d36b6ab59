#include "peakramp/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

namespace peakramp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput("generator config: " + what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

Vector shape_profile(const GenConfig& cfg) {
  Vector w(cfg.horizon);
  for (int t = 0; t < cfg.horizon; ++t) w[t] = cfg.peak_hours.contains(t + 1) ? cfg.peak_ratio : 1.0;
  return w / w.sum();
}

// Half-sine sampled at slot midpoints, so both edge slots of the window carry
// a small positive value and the window's middle slot is the maximum.
Vector renewable_shape(const GenConfig& cfg) {
  Vector w = Vector::Zero(cfg.horizon);
  const int m = cfg.renewable_hours.count();
  for (int j = 0; j < m; ++j)
    w[cfg.renewable_hours.first - 1 + j] = std::sin(std::numbers::pi * (j + 0.5) / m);
  return w / w.sum();
}

Vector rounded(const Vector& v) { return v.unaryExpr([](double x) { return round_significant(x); }); }

}  // namespace

void GenConfig::validate() const {
  require(n_prosumers >= 1, "n_prosumers must be >= 1");
  require(horizon >= 2, "horizon must be >= 2");
  require(daily_demand_mean > 0.0, "daily_demand_mean must be positive");
  require(in_unit(daily_demand_spread), "daily_demand_spread must lie in [0, 1]");
  require(in_unit(elastic_fraction), "elastic_fraction must lie in [0, 1]");
  require(in_unit(renewable_fraction_of_demand), "renewable_fraction_of_demand must lie in [0, 1]");
  require(in_unit(storage_init_fraction), "storage_init_fraction must lie in [0, 1]");
  require(eff > 0.0 && eff <= 1.0, "eff must lie in (0, 1]");
  require(peak_ratio > 0.0, "peak_ratio must be positive");
  require(storage_cap >= 0.0 && charge_max >= 0.0 && discharge_max >= 0.0,
          "storage sizes must be non-negative");
  for (const SlotRange* r : {&peak_hours, &renewable_hours})
    require(r->first >= 1 && r->first <= r->last && r->last <= horizon, "slot range outside horizon");
  peakramp::validate(hyper);
}

double round_significant(double value) {
  std::ostringstream out;
  out.precision(9);
  out << value;
  return std::strtod(out.str().c_str(), nullptr);
}

Scenario generate(const GenConfig& cfg) {
  cfg.validate();
  const Vector inelastic_shape = shape_profile(cfg);
  const Vector solar_shape = renewable_shape(cfg);

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> totals(cfg.daily_demand_mean * (1.0 - cfg.daily_demand_spread),
                                                cfg.daily_demand_mean * (1.0 + cfg.daily_demand_spread));
  Scenario sc;
  sc.horizon = cfg.horizon;
  sc.hyper = cfg.hyper;
  for (int n = 0; n < cfg.n_prosumers; ++n) {
    const double total = round_significant(totals(rng));
    ProsumerParams p;
    p.inelastic = rounded((1.0 - cfg.elastic_fraction) * total * inelastic_shape);
    p.elastic_total = round_significant(total - p.inelastic.sum());
    p.renewable = rounded(cfg.renewable_fraction_of_demand * total * solar_shape);
    p.elastic_min = 0.0;
    p.elastic_max = round_significant(2.0 * p.elastic_total / cfg.horizon);
    p.charge_max = cfg.charge_max;
    p.discharge_max = cfg.discharge_max;
    p.storage_cap = cfg.storage_cap;
    p.storage_init = round_significant(cfg.storage_init_fraction * cfg.storage_cap);
    p.eff_charge = cfg.eff;
    p.eff_discharge = cfg.eff;
    sc.prosumers.push_back(std::move(p));
  }
  const SystemSolution base = baseline_schedule(sc);
  sc.prev_net_load = round_significant(base.net_load[cfg.horizon - 1]);
  validate(sc);
  return sc;
}

Schedule baseline_prosumer_schedule(const ProsumerParams& p) {
  const int horizon = p.horizon();
  Vector weight = p.inelastic.cwiseMax(0.0);
  if (weight.sum() <= 0.0) weight.setOnes();

  // Proportional split; slots that break a bound are pinned to it and the
  // rest of the budget is re-split over the remaining slots.
  Vector e = Vector::Zero(horizon);
  std::vector<bool> pinned(static_cast<std::size_t>(horizon), false);
  for (int round = 0; round <= horizon; ++round) {
    double budget = p.elastic_total;
    double free_weight = 0.0;
    int free_slots = 0;
    for (int t = 0; t < horizon; ++t) {
      if (pinned[t]) {
        budget -= e[t];
      } else {
        free_weight += weight[t];
        ++free_slots;
      }
    }
    if (free_slots == 0) break;
    for (int t = 0; t < horizon; ++t) {
      if (pinned[t]) continue;
      e[t] = free_weight > 0.0 ? budget * weight[t] / free_weight : budget / free_slots;
    }
    bool over = false;
    for (int t = 0; t < horizon; ++t) {
      if (!pinned[t] && e[t] > p.elastic_max) {
        e[t] = p.elastic_max;
        pinned[t] = over = true;
      }
    }
    if (over) continue;
    bool under = false;
    for (int t = 0; t < horizon; ++t) {
      if (!pinned[t] && e[t] < p.elastic_min) {
        e[t] = p.elastic_min;
        pinned[t] = under = true;
      }
    }
    if (!under) break;
  }
  return make_schedule(p, std::move(e), Vector::Zero(horizon), Vector::Zero(horizon));
}

SystemSolution baseline_schedule(const Scenario& sc) {
  validate(sc);
  std::vector<Schedule> schedules;
  schedules.reserve(sc.prosumers.size());
  for (const auto& p : sc.prosumers) schedules.push_back(baseline_prosumer_schedule(p));
  return assemble(std::move(schedules), sc.prev_net_load);
}

}  // namespace peakramp
