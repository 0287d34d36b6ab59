#include "peakramp/async_admm.hpp"

#include "peakramp/centralized.hpp"
#include "peakramp/sync_admm.hpp"

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace peakramp;
using fixtures::vec;

namespace {

// Cyclic sequential schedule: prosumer 0, 1, ..., N-1, 0, ... Each prosumer
// keeps the d̂ it was last sent; the first pass starts from z = 0, d̂ = 0.
double round_robin_reference(const Scenario& sc, long events) {
  const int count = sc.size();
  const HyperParams& h = sc.hyper;
  Matrix z = Matrix::Zero(count, sc.horizon);
  Matrix sent = Matrix::Zero(count, sc.horizon);
  Matrix plan(count, sc.horizon);
  std::vector<Vector> pending_z(count);
  for (int n = 0; n < count; ++n) {
    const AsyncStep s = prosumer_step_async(sc.prosumers[n], sent.row(n).transpose(),
                                            z.row(n).transpose(), h.gamma, h.eta);
    pending_z[n] = s.z_new;
    plan.row(n) = s.schedule.net_demand.transpose();
  }
  Matrix reported = plan;
  for (long k = 0; k < events; ++k) {
    const int n = static_cast<int>(k % count);
    z.row(n) = pending_z[n].transpose();
    reported.row(n) = plan.row(n);
    sent.row(n) = aggregator_update_async(z, h.gamma, sc.prev_net_load).d_hat.row(n);
    const AsyncStep s = prosumer_step_async(sc.prosumers[n], sent.row(n).transpose(),
                                            z.row(n).transpose(), h.gamma, h.eta);
    pending_z[n] = s.z_new;
    plan.row(n) = s.schedule.net_demand.transpose();
  }
  return peak_ramp(ramp_vector(reported.colwise().sum().transpose(), sc.prev_net_load));
}

DelayModel equal_delays() {
  DelayModel m;
  m.sigma = 0.0;
  return m;
}

}  // namespace

TEST_CASE("async step follows the four update formulas") {
  const ProsumerParams p = fixtures::rigid(vec({0.4, 0.6}));
  const double eta = 0.5;
  const AsyncStep s = prosumer_step_async(p, vec({1.0, 1.0}), Vector::Zero(2), 1.0, eta);
  CHECK((s.schedule.net_demand - vec({0.4, 0.6})).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.w_g - vec({1.0, 1.0})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((s.w_f - vec({1.6, 1.4})).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.z_new - eta * vec({0.6, 0.4})).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("async step leaves z alone at its fixed point") {
  const ProsumerParams p = fixtures::rigid(vec({1.0, 0.5, 2.0}));
  const Vector z = vec({0.3, -0.2, 0.1});
  const AsyncStep s = prosumer_step_async(p, p.inelastic, z, 0.5, 0.5);
  CHECK((s.z_new - z).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("async step on a singleton set ignores the w terms") {
  const ProsumerParams p = fixtures::rigid(vec({1.0, 0.5, 2.0}));
  for (double zscale : {-3.0, 0.0, 5.0}) {
    const AsyncStep s = prosumer_step_async(p, vec({4.0, -1.0, 0.0}), Vector::Constant(3, zscale), 0.7, 0.3);
    CHECK((s.schedule.net_demand - p.inelastic).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("async step rejects bad step sizes") {
  const ProsumerParams p = fixtures::rigid(vec({1.0, 0.5}));
  CHECK_THROWS_AS(prosumer_step_async(p, Vector::Zero(2), Vector::Zero(2), 0.0, 0.5), InvalidInput);
  CHECK_THROWS_AS(prosumer_step_async(p, Vector::Zero(2), Vector::Zero(2), 0.5, 1.0), InvalidInput);
  CHECK_THROWS_AS(prosumer_step_async(p, Vector::Zero(3), Vector::Zero(2), 0.5, 0.5), InvalidInput);
}

TEST_CASE("async residual examples") {
  const Vector z = vec({0.1, 0.2});
  CHECK(async_residual(z, z, 0.5, 0.5) == 0.0);
  const Vector g = vec({0.3, -0.4});
  CHECK(async_residual(z, z + g, 0.5, 0.5) == doctest::Approx(0.5 / 0.25));
  CHECK(async_residual(z, z + g, 1.0, 0.5) == doctest::Approx(0.5 * async_residual(z, z + g, 0.5, 0.5)));
}

TEST_CASE("delay draws are positive, clipped and seeded") {
  DelayModel m;
  m.sigma = 2.0;
  m.seed = 99;
  DelaySampler a(m), b(m);
  double lo = 1e9, hi = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x = a.draw(i % 3);
    CHECK(x == b.draw(i % 3));
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo <= 10.0 + 1e-12);

  DelaySampler flat(equal_delays());
  CHECK(flat.draw(0) == 1.0);

  DelayModel bad;
  bad.medians = {1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(3), InvalidInput);
  bad.medians = {1.0, 0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(3), InvalidInput);
}

TEST_CASE("equal delays process prosumers round robin") {
  Scenario sc = fixtures::small_scenario(3, 8, 2.0);
  sc.hyper.max_events = 60;
  const auto run = run_async(sc, equal_delays());
  REQUIRE(run.trace.size() == 60);
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    CHECK(run.trace[i].prosumer == static_cast<int>(i % 3));
    CHECK(run.trace[i].sim_time == doctest::Approx(1.0 + static_cast<double>(i / 3)));
  }
  CHECK(std::abs(run.trace.back().objective - round_robin_reference(sc, 60)) < 1e-3);
}

TEST_CASE("round robin run matches the sequential reference at convergence") {
  const Scenario sc = fixtures::small_scenario(3, 8, 2.0);
  const auto run = run_async(sc, equal_delays());
  REQUIRE(run.converged);
  CHECK(std::abs(run.trace.back().objective - round_robin_reference(sc, run.events)) < 1e-3);
}

TEST_CASE("single prosumer async agrees with sync") {
  const Scenario sc = fixtures::small_scenario(1, 12, 1.0);
  const auto async = run_async(sc);
  const auto sync = run_sync(sc);
  CHECK(async.converged);
  CHECK(std::abs(async.solution.peak_ramp - sync.solution.peak_ramp) < 1e-3);
}

TEST_CASE("event counter matches processed arrivals") {
  Scenario sc = fixtures::small_scenario(4, 8, 2.0);
  sc.hyper.max_events = 250;
  sc.hyper.eps_rel = 0.0;
  const auto run = run_async(sc);
  CHECK(run.events == 250);
  CHECK(run.state.k == 250);
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    CHECK(run.trace[i].event == static_cast<long>(i) + 1);
    if (i > 0) CHECK(run.trace[i].sim_time >= run.trace[i - 1].sim_time);
  }
}

TEST_CASE("async runs repeat exactly for a fixed delay seed") {
  const Scenario sc = fixtures::small_scenario(4, 8, 2.0);
  DelayModel m;
  m.seed = 5;
  const auto a = run_async(sc, m);
  const auto b = run_async(sc, m);
  REQUIRE(a.trace.size() == b.trace.size());
  bool same = true;
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    same = same && a.trace[i].prosumer == b.trace[i].prosumer &&
           a.trace[i].sim_time == b.trace[i].sim_time && a.trace[i].objective == b.trace[i].objective &&
           a.trace[i].fp_residual == b.trace[i].fp_residual;
  CHECK(same);

  m.seed = 6;
  const auto c = run_async(sc, m);
  bool order_differs = false;
  for (std::size_t i = 0; i < std::min(a.trace.size(), c.trace.size()); ++i)
    order_differs = order_differs || a.trace[i].prosumer != c.trace[i].prosumer;
  CHECK(order_differs);
}

TEST_CASE("async fixed point is optimal and feasible") {
  for (const Scenario& sc : {fixtures::grid_fixture(), fixtures::small_scenario(3, 12, 2.0)}) {
    const auto run = run_async(sc);
    REQUIRE(run.converged);
    const double central = solve_centralized(sc).objective;
    CHECK(std::abs(run.solution.peak_ramp - central) / central < 1e-3);
    for (int n = 0; n < sc.size(); ++n)
      CHECK(check_feasible(sc.prosumers[n], run.solution.schedules[n]).feasible());
  }
}
