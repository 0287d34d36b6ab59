#include "peakramp/io.hpp"

#include "peakramp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace peakramp::io {

namespace {

Json energies(const Vector& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(round_significant(x));
  return arr;
}

Json exact(const Vector& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(where + ": missing key '" + key + "'");
  return *it;
}

double number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) throw InvalidInput(where + "." + key + ": expected a number");
  return v.get<double>();
}

long integer(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw InvalidInput(where + "." + key + ": expected an integer");
  return v.get<long>();
}

Vector vector(const Json& obj, const char* key, const std::string& where, long length) {
  const Json& v = field(obj, key, where);
  const std::string name = where + "." + key;
  if (!v.is_array()) throw InvalidInput(name + ": expected an array");
  if (length >= 0 && static_cast<long>(v.size()) != length)
    throw InvalidInput(name + ": expected " + std::to_string(length) + " entries, found " +
                       std::to_string(v.size()));
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw InvalidInput(name + "[" + std::to_string(i) + "]: expected a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

std::string format_number(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text, const char* header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw InvalidInput(std::string("trace: expected header '") + header + "'");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns)
      throw InvalidInput("trace: row " + std::to_string(rows.size() + 1) + " has " +
                         std::to_string(cells.size()) + " cells");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& cell) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') throw InvalidInput("trace: bad number '" + cell + "'");
  return v;
}

long parse_long(const std::string& cell) {
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (cell.empty() || *end != '\0') throw InvalidInput("trace: bad integer '" + cell + "'");
  return v;
}

}  // namespace

Json scenario_to_json(const Scenario& sc) {
  Json doc;
  doc["horizon"] = sc.horizon;
  doc["prev_net_load"] = round_significant(sc.prev_net_load);
  doc["hyper"] = {{"rho", sc.hyper.rho},         {"gamma", sc.hyper.gamma},
                  {"eta", sc.hyper.eta},         {"eps_abs", sc.hyper.eps_abs},
                  {"eps_rel", sc.hyper.eps_rel}, {"max_iter", sc.hyper.max_iter},
                  {"max_events", sc.hyper.max_events}};
  Json prosumers = Json::array();
  for (const auto& p : sc.prosumers) {
    Json j;
    j["inelastic"] = energies(p.inelastic);
    j["renewable"] = energies(p.renewable);
    j["elastic_total"] = round_significant(p.elastic_total);
    j["elastic_min"] = round_significant(p.elastic_min);
    j["elastic_max"] = round_significant(p.elastic_max);
    j["charge_max"] = round_significant(p.charge_max);
    j["discharge_max"] = round_significant(p.discharge_max);
    j["storage_cap"] = round_significant(p.storage_cap);
    j["storage_init"] = round_significant(p.storage_init);
    j["eff_charge"] = p.eff_charge;
    j["eff_discharge"] = p.eff_discharge;
    prosumers.push_back(std::move(j));
  }
  doc["prosumers"] = std::move(prosumers);
  return doc;
}

Scenario scenario_from_json(const Json& doc) {
  Scenario sc;
  const long horizon = integer(doc, "horizon", "scenario");
  if (horizon < 2) throw InvalidInput("scenario.horizon: must be at least 2");
  sc.horizon = static_cast<int>(horizon);
  sc.prev_net_load = number(doc, "prev_net_load", "scenario");

  const Json& hyper = field(doc, "hyper", "scenario");
  sc.hyper.rho = number(hyper, "rho", "scenario.hyper");
  sc.hyper.gamma = number(hyper, "gamma", "scenario.hyper");
  sc.hyper.eta = number(hyper, "eta", "scenario.hyper");
  sc.hyper.eps_abs = number(hyper, "eps_abs", "scenario.hyper");
  sc.hyper.eps_rel = number(hyper, "eps_rel", "scenario.hyper");
  sc.hyper.max_iter = static_cast<int>(integer(hyper, "max_iter", "scenario.hyper"));
  sc.hyper.max_events = static_cast<int>(integer(hyper, "max_events", "scenario.hyper"));

  const Json& list = field(doc, "prosumers", "scenario");
  if (!list.is_array()) throw InvalidInput("scenario.prosumers: expected an array");
  for (std::size_t n = 0; n < list.size(); ++n) {
    const std::string where = "scenario.prosumers[" + std::to_string(n) + "]";
    const Json& j = list[n];
    ProsumerParams p;
    p.inelastic = vector(j, "inelastic", where, horizon);
    p.renewable = vector(j, "renewable", where, horizon);
    p.elastic_total = number(j, "elastic_total", where);
    p.elastic_min = number(j, "elastic_min", where);
    p.elastic_max = number(j, "elastic_max", where);
    p.charge_max = number(j, "charge_max", where);
    p.discharge_max = number(j, "discharge_max", where);
    p.storage_cap = number(j, "storage_cap", where);
    p.storage_init = number(j, "storage_init", where);
    p.eff_charge = number(j, "eff_charge", where);
    p.eff_discharge = number(j, "eff_discharge", where);
    sc.prosumers.push_back(std::move(p));
  }
  validate(sc);
  return sc;
}

Json solution_to_json(const SystemSolution& sol, const SolutionStatus& status) {
  Json doc;
  doc["kind"] = status.kind;
  doc["converged"] = status.converged;
  doc["steps"] = status.steps;
  doc["peak_ramp"] = sol.peak_ramp;
  doc["net_load"] = exact(sol.net_load);
  doc["ramps"] = exact(sol.ramps);
  Json schedules = Json::array();
  for (const auto& s : sol.schedules) {
    schedules.push_back({{"elastic", exact(s.elastic)},
                         {"charge", exact(s.charge)},
                         {"discharge", exact(s.discharge)},
                         {"storage", exact(s.storage)},
                         {"net_demand", exact(s.net_demand)}});
  }
  doc["schedules"] = std::move(schedules);
  return doc;
}

SystemSolution solution_from_json(const Json& doc) {
  SystemSolution sol;
  sol.peak_ramp = number(doc, "peak_ramp", "solution");
  sol.net_load = vector(doc, "net_load", "solution", -1);
  const long horizon = static_cast<long>(sol.net_load.size());
  sol.ramps = vector(doc, "ramps", "solution", horizon);
  const Json& list = field(doc, "schedules", "solution");
  if (!list.is_array()) throw InvalidInput("solution.schedules: expected an array");
  for (std::size_t n = 0; n < list.size(); ++n) {
    const std::string where = "solution.schedules[" + std::to_string(n) + "]";
    Schedule s;
    s.elastic = vector(list[n], "elastic", where, horizon);
    s.charge = vector(list[n], "charge", where, horizon);
    s.discharge = vector(list[n], "discharge", where, horizon);
    s.storage = vector(list[n], "storage", where, horizon + 1);
    s.net_demand = vector(list[n], "net_demand", where, horizon);
    sol.schedules.push_back(std::move(s));
  }
  return sol;
}

std::string sync_trace_csv(const std::vector<SyncRecord>& trace) {
  std::ostringstream out;
  out << kSyncTraceHeader << '\n';
  for (const auto& r : trace)
    out << r.iter << ',' << format_number(r.sim_time) << ',' << format_number(r.objective) << ','
        << format_number(r.primal_residual) << ',' << format_number(r.dual_residual) << '\n';
  return out.str();
}

std::string async_trace_csv(const std::vector<AsyncRecord>& trace) {
  std::ostringstream out;
  out << kAsyncTraceHeader << '\n';
  for (const auto& r : trace)
    out << r.event << ',' << format_number(r.sim_time) << ',' << r.prosumer << ','
        << format_number(r.objective) << ',' << format_number(r.fp_residual) << '\n';
  return out.str();
}

std::vector<SyncRecord> parse_sync_trace(const std::string& text) {
  std::vector<SyncRecord> out;
  for (const auto& c : csv_rows(text, kSyncTraceHeader))
    out.push_back({static_cast<int>(parse_long(c[0])), parse_double(c[1]), parse_double(c[2]),
                   parse_double(c[3]), parse_double(c[4])});
  return out;
}

std::vector<AsyncRecord> parse_async_trace(const std::string& text) {
  std::vector<AsyncRecord> out;
  for (const auto& c : csv_rows(text, kAsyncTraceHeader))
    out.push_back({parse_long(c[0]), parse_double(c[1]), static_cast<int>(parse_long(c[2])),
                   parse_double(c[3]), parse_double(c[4])});
  return out;
}

Json report_to_json(const ComparisonReport& r, const std::optional<EnergyAccounting>& energy) {
  Json doc;
  doc["baseline_peak_ramp"] = r.baseline_peak_ramp;
  doc["optimized_peak_ramp"] = r.optimized_peak_ramp;
  doc["reduction_fraction"] = r.reduction_fraction;
  doc["baseline_spread"] = r.baseline_spread;
  doc["optimized_spread"] = r.optimized_spread;
  doc["central_objective"] = r.central_objective;
  doc["baseline_net_load"] = exact(r.baseline_net_load);
  doc["optimized_net_load"] = exact(r.optimized_net_load);
  Json algorithms = Json::array();
  for (const auto& a : r.algorithms) {
    algorithms.push_back({{"algorithm", a.algorithm},
                          {"iterations_to_tolerance", a.iterations_to_tolerance},
                          {"steps", a.steps},
                          {"final_objective", a.final_objective},
                          {"relative_gap", a.relative_gap}});
  }
  doc["algorithms"] = std::move(algorithms);
  if (energy) {
    doc["energy"] = {{"max_consumption_gap", energy->max_consumption_gap},
                     {"grid_difference", energy->grid_difference},
                     {"round_trip_loss", energy->round_trip_loss},
                     {"storage_term", energy->storage_term}};
  }
  return doc;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(source + ": " + e.what());
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace peakramp::io
