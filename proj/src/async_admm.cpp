#include "peakramp/async_admm.hpp"

#include "peakramp/prosumer_program.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>

namespace peakramp {

AsyncStep prosumer_step_async(const ProsumerParams& params, const Vector& d_hat_n,
                              const Vector& z_n, double gamma, double eta) {
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("eta must lie in (0, 1)");
  if (d_hat_n.size() != params.horizon() || z_n.size() != params.horizon())
    throw InvalidInput("prosumer_step_async: vector length differs from horizon");

  AsyncStep step;
  step.w_g = z_n + gamma * d_hat_n;
  step.schedule =
      solve_prosumer_qp(params, gamma, -(2.0 * step.w_g - z_n), "async prosumer subproblem");
  step.w_f = 2.0 * step.w_g - z_n - gamma * step.schedule.net_demand;
  step.z_new = z_n + eta * (step.w_f - step.w_g);
  return step;
}

double async_residual(const Vector& z_prev, const Vector& z_new, double eta, double gamma) {
  if (z_prev.size() != z_new.size()) throw InvalidInput("async_residual: length mismatch");
  return (z_new - z_prev).norm() / (eta * gamma);
}

namespace {

double plan_peak(const Matrix& plan, double prev) {
  return peak_ramp(ramp_vector(plan.colwise().sum().transpose(), prev));
}

}  // namespace

AsyncResult run_async(const Scenario& sc, const DelayModel& delays) {
  validate(sc);
  const int count = sc.size();
  const int horizon = sc.horizon;
  const HyperParams& hyper = sc.hyper;
  delays.validate(count);

  AsyncState state;
  state.z = Matrix::Zero(count, horizon);
  state.d_hat = Matrix::Zero(count, horizon);
  state.plan = Matrix::Zero(count, horizon);

  DelaySampler sampler(delays);
  std::priority_queue<AsyncEvent, std::vector<AsyncEvent>, std::greater<>> queue;
  std::vector<AsyncStep> in_flight(static_cast<std::size_t>(count));
  std::vector<Schedule> plans(static_cast<std::size_t>(count));

  for (int n = 0; n < count; ++n) {
    in_flight[n] = prosumer_step_async(sc.prosumers[n], state.d_hat.row(n).transpose(),
                                       state.z.row(n).transpose(), hyper.gamma, hyper.eta);
    plans[n] = in_flight[n].schedule;
    state.plan.row(n) = plans[n].net_demand.transpose();
    queue.push({sampler.draw(n), n});
  }

  AsyncResult result;
  std::deque<double> window_res;
  std::deque<double> window_obj;
  double window_sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Schedule> best_plans = plans;

  while (state.k < hyper.max_events && !queue.empty()) {
    const AsyncEvent ev = queue.top();
    queue.pop();
    const int n = ev.prosumer;
    state.sim_time = ev.time;

    AsyncStep& done = in_flight[n];
    const double res = async_residual(state.z.row(n).transpose(), done.z_new, hyper.eta, hyper.gamma);
    state.z.row(n) = done.z_new.transpose();
    plans[n] = std::move(done.schedule);
    state.plan.row(n) = plans[n].net_demand.transpose();

    const AggregatorResult agg = aggregator_update_async(state.z, hyper.gamma, sc.prev_net_load);
    state.gamma_val = agg.peak;
    state.d_hat.row(n) = agg.d_hat.row(n);
    ++state.k;

    const double objective = plan_peak(state.plan, sc.prev_net_load);
    window_res.push_back(res);
    window_obj.push_back(objective);
    window_sum += res;
    if (static_cast<int>(window_res.size()) > count) {
      window_sum -= window_res.front();
      window_res.pop_front();
      window_obj.pop_front();
    }
    const double mean_res = window_sum / static_cast<double>(window_res.size());
    result.trace.push_back({state.k, state.sim_time, n, objective, mean_res});

    bool done_all = false;
    if (static_cast<int>(window_res.size()) == count && mean_res < hyper.eps_rel) {
      const auto [lo, hi] = std::minmax_element(window_obj.begin(), window_obj.end());
      done_all = (*hi - *lo) <= hyper.eps_rel * std::max(objective, 1e-9);
    }
    if (done_all || objective < best) {
      best = objective;
      best_plans = plans;
    }
    if (done_all) {
      result.converged = true;
      break;
    }

    in_flight[n] = prosumer_step_async(sc.prosumers[n], state.d_hat.row(n).transpose(),
                                       state.z.row(n).transpose(), hyper.gamma, hyper.eta);
    queue.push({ev.time + sampler.draw(n), n});
  }

  result.events = state.k;
  result.solution = assemble(std::move(best_plans), sc.prev_net_load);
  result.state = std::move(state);
  return result;
}

}  // namespace peakramp
