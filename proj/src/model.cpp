#include "peakramp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace peakramp {

namespace {

void require_length(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << ": expected length " << n << ", got " << v.size();
    throw InvalidInput(msg.str());
  }
}

bool all_finite_nonneg(const Vector& v) {
  return v.allFinite() && (v.size() == 0 || v.minCoeff() >= 0.0);
}

}  // namespace

bool operator==(const ProsumerParams& a, const ProsumerParams& b) {
  return a.inelastic.size() == b.inelastic.size() &&
         a.renewable.size() == b.renewable.size() &&
         a.inelastic == b.inelastic && a.renewable == b.renewable &&
         a.elastic_total == b.elastic_total &&
         a.elastic_min == b.elastic_min && a.elastic_max == b.elastic_max &&
         a.charge_max == b.charge_max && a.discharge_max == b.discharge_max &&
         a.storage_cap == b.storage_cap && a.storage_init == b.storage_init &&
         a.eff_charge == b.eff_charge && a.eff_discharge == b.eff_discharge;
}

void validate(const ProsumerParams& p, const std::string& label) {
  auto fail = [&](const std::string& why) {
    throw InvalidInput(label + ": " + why);
  };
  const auto horizon = p.inelastic.size();
  if (horizon == 0) fail("empty inelastic profile");
  if (p.renewable.size() != horizon) fail("renewable length differs from inelastic length");
  if (!all_finite_nonneg(p.inelastic)) fail("inelastic profile must be finite and non-negative");
  if (!all_finite_nonneg(p.renewable)) fail("renewable profile must be finite and non-negative");

  const double scalars[] = {p.elastic_total, p.elastic_min,  p.elastic_max,
                            p.charge_max,    p.discharge_max, p.storage_cap,
                            p.storage_init};
  for (double v : scalars) {
    if (!std::isfinite(v) || v < 0.0) fail("energy parameters must be finite and non-negative");
  }
  if (p.elastic_min > p.elastic_max) fail("elastic_min exceeds elastic_max");

  const double t = static_cast<double>(horizon);
  // Relative slack so that budgets computed as T * bound survive rounding.
  const double slack = 1e-9 * std::max(1.0, p.elastic_total);
  if (t * p.elastic_min > p.elastic_total + slack ||
      p.elastic_total > t * p.elastic_max + slack) {
    std::ostringstream msg;
    msg << "infeasible elastic budget " << p.elastic_total << " kWh outside ["
        << t * p.elastic_min << ", " << t * p.elastic_max << "]";
    fail(msg.str());
  }
  if (p.storage_init > p.storage_cap) fail("storage_init exceeds storage_cap");
  if (!(p.eff_charge > 0.0 && p.eff_charge <= 1.0)) fail("eff_charge must lie in (0, 1]");
  if (!(p.eff_discharge > 0.0 && p.eff_discharge <= 1.0)) fail("eff_discharge must lie in (0, 1]");
}

void validate(const HyperParams& h) {
  if (!(h.rho > 0.0) || !std::isfinite(h.rho)) throw InvalidInput("rho must be positive");
  if (!(h.gamma > 0.0) || !std::isfinite(h.gamma)) throw InvalidInput("gamma must be positive");
  if (!(h.eta > 0.0 && h.eta < 1.0)) throw InvalidInput("eta must lie in (0, 1)");
  if (!(h.eps_abs >= 0.0) || !(h.eps_rel >= 0.0)) throw InvalidInput("residual tolerances must be non-negative");
  if (h.max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  if (h.max_events < 1) throw InvalidInput("max_events must be at least 1");
}

void validate(const Scenario& sc) {
  if (sc.prosumers.empty()) throw InvalidInput("scenario has no prosumers");
  if (sc.horizon < 2) throw InvalidInput("horizon must be at least 2");
  if (!std::isfinite(sc.prev_net_load)) throw InvalidInput("prev_net_load must be finite");
  for (int n = 0; n < sc.size(); ++n) {
    const std::string label = "prosumer " + std::to_string(n);
    if (sc.prosumers[n].horizon() != sc.horizon) {
      throw InvalidInput(label + ": profile length " +
                         std::to_string(sc.prosumers[n].horizon()) +
                         " differs from horizon " + std::to_string(sc.horizon));
    }
    validate(sc.prosumers[n], label);
  }
  validate(sc.hyper);
}

Vector net_demand(const ProsumerParams& p, const Vector& elastic,
                  const Vector& charge, const Vector& discharge) {
  const auto t = p.inelastic.size();
  require_length(p.renewable, t, "renewable");
  require_length(elastic, t, "elastic");
  require_length(charge, t, "charge");
  require_length(discharge, t, "discharge");
  return p.inelastic + elastic + charge - p.eff_discharge * discharge - p.renewable;
}

Vector storage_trajectory(const ProsumerParams& p, const Vector& charge,
                          const Vector& discharge) {
  require_length(discharge, charge.size(), "discharge");
  Vector s(charge.size() + 1);
  s[0] = p.storage_init;
  for (Eigen::Index t = 0; t < charge.size(); ++t) {
    s[t + 1] = s[t] + p.eff_charge * charge[t] - discharge[t];
  }
  return s;
}

Vector net_load(std::span<const Vector> demands) {
  if (demands.empty()) throw InvalidInput("net_load: no demand vectors");
  Vector load = demands.front();
  for (const auto& d : demands.subspan(1)) {
    require_length(d, load.size(), "net_load");
    load += d;
  }
  return load;
}

Vector ramp_vector(const Vector& load, double prev_net_load) {
  Vector r(load.size());
  double prev = prev_net_load;
  for (Eigen::Index t = 0; t < load.size(); ++t) {
    r[t] = load[t] - prev;
    prev = load[t];
  }
  return r;
}

double peak_ramp(const Vector& ramps) {
  return ramps.size() == 0 ? 0.0 : ramps.cwiseAbs().maxCoeff();
}

Schedule make_schedule(const ProsumerParams& p, Vector elastic, Vector charge,
                       Vector discharge) {
  Schedule s;
  s.net_demand = net_demand(p, elastic, charge, discharge);
  s.storage = storage_trajectory(p, charge, discharge);
  s.elastic = std::move(elastic);
  s.charge = std::move(charge);
  s.discharge = std::move(discharge);
  return s;
}

SystemSolution assemble(std::vector<Schedule> schedules, double prev_net_load) {
  std::vector<Vector> demands;
  demands.reserve(schedules.size());
  for (const auto& s : schedules) demands.push_back(s.net_demand);
  SystemSolution out;
  out.net_load = net_load(demands);
  out.ramps = ramp_vector(out.net_load, prev_net_load);
  out.peak_ramp = peak_ramp(out.ramps);
  out.schedules = std::move(schedules);
  return out;
}

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Shape: return "shape";
    case ConstraintKind::ElasticLower: return "elastic_lower";
    case ConstraintKind::ElasticUpper: return "elastic_upper";
    case ConstraintKind::ElasticBalance: return "elastic_balance";
    case ConstraintKind::ChargeLower: return "charge_lower";
    case ConstraintKind::ChargeUpper: return "charge_upper";
    case ConstraintKind::DischargeLower: return "discharge_lower";
    case ConstraintKind::DischargeUpper: return "discharge_upper";
    case ConstraintKind::StorageInitial: return "storage_initial";
    case ConstraintKind::StorageRecursion: return "storage_recursion";
    case ConstraintKind::StorageLower: return "storage_lower";
    case ConstraintKind::StorageUpper: return "storage_upper";
    case ConstraintKind::NetDemandIdentity: return "net_demand_identity";
  }
  return "unknown";
}

double FeasibilityReport::max_violation() const {
  double m = 0.0;
  for (const auto& v : violations) m = std::max(m, v.magnitude);
  return m;
}

bool FeasibilityReport::has(ConstraintKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

FeasibilityReport check_feasible(const ProsumerParams& p, const Schedule& s,
                                 double tol) {
  FeasibilityReport report;
  const auto horizon = p.inelastic.size();
  auto add = [&](ConstraintKind kind, int slot, double magnitude) {
    if (magnitude > tol) report.violations.push_back({kind, slot, magnitude});
  };

  if (s.elastic.size() != horizon || s.charge.size() != horizon ||
      s.discharge.size() != horizon || s.net_demand.size() != horizon ||
      s.storage.size() != horizon + 1 || p.renewable.size() != horizon) {
    report.violations.push_back({ConstraintKind::Shape, -1, 1.0});
    return report;
  }

  for (Eigen::Index i = 0; i < horizon; ++i) {
    const int t = static_cast<int>(i);
    add(ConstraintKind::ElasticLower, t, p.elastic_min - s.elastic[i]);
    add(ConstraintKind::ElasticUpper, t, s.elastic[i] - p.elastic_max);
    add(ConstraintKind::ChargeLower, t, -s.charge[i]);
    add(ConstraintKind::ChargeUpper, t, s.charge[i] - p.charge_max);
    add(ConstraintKind::DischargeLower, t, -s.discharge[i]);
    add(ConstraintKind::DischargeUpper, t, s.discharge[i] - p.discharge_max);
    add(ConstraintKind::StorageRecursion, t,
        std::abs(s.storage[i + 1] - s.storage[i] -
                 p.eff_charge * s.charge[i] + s.discharge[i]));
    const double identity = p.inelastic[i] + s.elastic[i] + s.charge[i] -
                            p.eff_discharge * s.discharge[i] - p.renewable[i];
    add(ConstraintKind::NetDemandIdentity, t, std::abs(s.net_demand[i] - identity));
  }
  add(ConstraintKind::ElasticBalance, -1, std::abs(s.elastic.sum() - p.elastic_total));
  add(ConstraintKind::StorageInitial, 0, std::abs(s.storage[0] - p.storage_init));
  for (Eigen::Index i = 0; i <= horizon; ++i) {
    add(ConstraintKind::StorageLower, static_cast<int>(i), -s.storage[i]);
    add(ConstraintKind::StorageUpper, static_cast<int>(i), s.storage[i] - p.storage_cap);
  }
  return report;
}

}  // namespace peakramp
