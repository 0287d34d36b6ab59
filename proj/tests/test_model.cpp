#include "peakramp/model.hpp"

#include <doctest.h>

#include <random>

using namespace peakramp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ProsumerParams flat_prosumer(int horizon) {
  ProsumerParams p;
  p.inelastic = Vector::Constant(horizon, 1.0);
  p.renewable = Vector::Zero(horizon);
  p.elastic_total = horizon * 0.5;
  p.elastic_min = 0.0;
  p.elastic_max = 1.0;
  p.charge_max = 1.0;
  p.discharge_max = 1.0;
  p.storage_cap = 4.0;
  p.storage_init = 1.0;
  p.eff_charge = 0.9;
  p.eff_discharge = 0.9;
  return p;
}

}  // namespace

TEST_CASE("net_demand evaluates the per-slot identity") {
  ProsumerParams p;
  p.inelastic = vec({2.0});
  p.renewable = vec({0.8});
  p.eff_discharge = 0.9;
  const Vector d = net_demand(p, vec({1.0}), vec({0.5}), vec({1.0}));
  CHECK(d[0] == doctest::Approx(1.8));

  ProsumerParams zero;
  zero.inelastic = Vector::Zero(3);
  zero.renewable = Vector::Zero(3);
  CHECK(net_demand(zero, Vector::Zero(3), Vector::Zero(3), Vector::Zero(3)).isZero());

  ProsumerParams exporter;
  exporter.inelastic = vec({0.0});
  exporter.renewable = vec({5.0});
  CHECK(net_demand(exporter, vec({0.0}), vec({0.0}), vec({0.0}))[0] == -5.0);

  CHECK_THROWS_AS(net_demand(p, vec({1.0, 2.0}), vec({0.5}), vec({1.0})), InvalidInput);
}

TEST_CASE("storage_trajectory follows the charge recursion") {
  ProsumerParams p;
  p.storage_init = 1.0;
  p.eff_charge = 0.9;
  Vector s = storage_trajectory(p, vec({1.0, 0.0}), vec({0.0, 0.5}));
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.9));
  CHECK(s[2] == doctest::Approx(1.4));

  s = storage_trajectory(p, Vector::Zero(4), Vector::Zero(4));
  CHECK((s.array() == 1.0).all());

  p.storage_init = 0.0;
  s = storage_trajectory(p, vec({1.0, 1.0, 1.0}), Vector::Zero(3));
  CHECK(s[1] == doctest::Approx(0.9));
  CHECK(s[2] == doctest::Approx(1.8));
  CHECK(s[3] == doctest::Approx(2.7));
}

TEST_CASE("net_load sums prosumer demands") {
  std::vector<Vector> two{vec({1, 2}), vec({3, 4})};
  CHECK(net_load(two) == vec({4, 6}));
  std::vector<Vector> one{vec({1.5, -2})};
  CHECK(net_load(one) == vec({1.5, -2}));
  std::vector<Vector> cancel{vec({1, -1}), vec({-1, 1})};
  CHECK(net_load(cancel).isZero());
  CHECK_THROWS_AS(net_load(std::vector<Vector>{}), InvalidInput);
  std::vector<Vector> ragged{vec({1, 2}), vec({3})};
  CHECK_THROWS_AS(net_load(ragged), InvalidInput);
}

TEST_CASE("ramp_vector and peak_ramp") {
  CHECK(ramp_vector(vec({5, 7, 4}), 6.0) == vec({-1, 2, -3}));
  CHECK(ramp_vector(vec({3, 3, 3}), 3.0).isZero());
  CHECK(ramp_vector(vec({10}), 0.0) == vec({10}));

  CHECK(peak_ramp(vec({-1, 2, -3})) == 3.0);
  CHECK(peak_ramp(Vector::Zero(5)) == 0.0);
  CHECK(peak_ramp(vec({-4, 1})) == 4.0);
}

TEST_CASE("ramp telescoping and zero-peak characterization hold on random loads") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int horizon = 1 + trial % 30;
    Vector load(horizon);
    for (auto& v : load) v = u(rng);
    const double prev = u(rng);
    const Vector r = ramp_vector(load, prev);
    CHECK(r.sum() == doctest::Approx(load[horizon - 1] - prev).epsilon(1e-12));
    CHECK(peak_ramp(r) >= 0.0);
    CHECK((peak_ramp(r) == 0.0) == ((load.array() == prev).all()));
  }
  CHECK(peak_ramp(ramp_vector(Vector::Constant(6, 2.5), 2.5)) == 0.0);
}

TEST_CASE("net demand, net load and ramps scale linearly with energy data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const int horizon = 8;
  for (double c : {0.5, 2.0, 10.0}) {
    ProsumerParams p = flat_prosumer(horizon);
    for (auto& v : p.inelastic) v = u(rng);
    for (auto& v : p.renewable) v = u(rng);
    Vector e(horizon), x(horizon), y(horizon);
    for (int t = 0; t < horizon; ++t) {
      e[t] = u(rng);
      x[t] = u(rng);
      y[t] = u(rng);
    }
    ProsumerParams scaled = p;
    scaled.inelastic *= c;
    scaled.renewable *= c;
    const Vector d = net_demand(p, e, x, y);
    const Vector dc = net_demand(scaled, c * e, c * x, c * y);
    CHECK((dc - c * d).cwiseAbs().maxCoeff() < 1e-12 * c * 10);
    const double prev = u(rng);
    CHECK(peak_ramp(ramp_vector(dc, c * prev)) ==
          doctest::Approx(c * peak_ramp(ramp_vector(d, prev))).epsilon(1e-12));
  }
}

TEST_CASE("check_feasible reports each violated constraint") {
  const int horizon = 4;
  ProsumerParams p = flat_prosumer(horizon);
  Schedule ok = make_schedule(p, Vector::Constant(horizon, 0.5), Vector::Zero(horizon),
                              Vector::Zero(horizon));
  CHECK(check_feasible(p, ok).feasible());

  SUBCASE("elastic at the maximum overshoots the balance") {
    Schedule s = make_schedule(p, Vector::Constant(horizon, p.elastic_max),
                               Vector::Zero(horizon), Vector::Zero(horizon));
    const auto report = check_feasible(p, s);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ConstraintKind::ElasticBalance);
    CHECK(report.violations[0].magnitude ==
          doctest::Approx(horizon * p.elastic_max - p.elastic_total));
  }
  SUBCASE("charge above its cap") {
    Vector x = Vector::Zero(horizon);
    x[1] = p.charge_max + 1.0;
    Schedule s = make_schedule(p, Vector::Constant(horizon, 0.5), x, Vector::Zero(horizon));
    const auto report = check_feasible(p, s);
    REQUIRE(report.has(ConstraintKind::ChargeUpper));
    for (const auto& v : report.violations) {
      if (v.kind == ConstraintKind::ChargeUpper) {
        CHECK(v.slot == 1);
        CHECK(v.magnitude == doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("storage drained below zero") {
    Schedule s = make_schedule(p, Vector::Constant(horizon, 0.5), Vector::Zero(horizon),
                               Vector::Constant(horizon, 0.5));
    const auto report = check_feasible(p, s);
    CHECK(report.has(ConstraintKind::StorageLower));
    CHECK(report.max_violation() == doctest::Approx(1.0));
  }
  SUBCASE("tampered identities") {
    Schedule s = ok;
    s.net_demand[2] += 0.25;
    s.storage[3] += 0.1;
    const auto report = check_feasible(p, s);
    CHECK(report.has(ConstraintKind::NetDemandIdentity));
    CHECK(report.has(ConstraintKind::StorageRecursion));
  }
  SUBCASE("wrong shape") {
    Schedule s = ok;
    s.storage.resize(horizon);
    CHECK(check_feasible(p, s).has(ConstraintKind::Shape));
  }
}

TEST_CASE("storage stays within bounds for schedules that pass the check") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int horizon = 12;
  ProsumerParams p = flat_prosumer(horizon);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Vector x(horizon), y(horizon);
    for (int t = 0; t < horizon; ++t) {
      x[t] = u(rng) * p.charge_max;
      y[t] = u(rng) * p.discharge_max;
    }
    const Schedule s = make_schedule(p, Vector::Constant(horizon, 0.5), x, y);
    if (!check_feasible(p, s).feasible()) continue;
    ++accepted;
    CHECK(s.storage.minCoeff() >= -kFeasibilityTol);
    CHECK(s.storage.maxCoeff() <= p.storage_cap + kFeasibilityTol);
  }
  CHECK(accepted > 0);
}

TEST_CASE("validate rejects malformed prosumers and scenarios") {
  ProsumerParams p = flat_prosumer(4);
  CHECK_NOTHROW(validate(p, "p"));

  ProsumerParams bad = p;
  bad.elastic_total = 100.0;
  CHECK_THROWS_WITH_AS(validate(bad, "prosumer 3"),
                       doctest::Contains("prosumer 3: infeasible elastic budget"),
                       InvalidInput);
  bad = p;
  bad.storage_init = 5.0;
  CHECK_THROWS_AS(validate(bad, "p"), InvalidInput);
  bad = p;
  bad.eff_charge = 0.0;
  CHECK_THROWS_AS(validate(bad, "p"), InvalidInput);
  bad = p;
  bad.renewable[0] = -1.0;
  CHECK_THROWS_AS(validate(bad, "p"), InvalidInput);

  Scenario sc;
  sc.horizon = 4;
  CHECK_THROWS_AS(validate(sc), InvalidInput);
  sc.prosumers = {p, flat_prosumer(5)};
  CHECK_THROWS_AS(validate(sc), InvalidInput);
  sc.prosumers = {p};
  CHECK_NOTHROW(validate(sc));
  sc.hyper.eta = 1.0;
  CHECK_THROWS_AS(validate(sc), InvalidInput);
}
