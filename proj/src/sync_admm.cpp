#include "peakramp/sync_admm.hpp"

#include "peakramp/prosumer_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace peakramp {

Schedule prosumer_update(const ProsumerParams& params, const Vector& d_hat_n, const Vector& mu_n,
                         double rho) {
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  if (d_hat_n.size() != params.horizon() || mu_n.size() != params.horizon())
    throw InvalidInput("prosumer_update: vector length differs from horizon");
  // -<μ, d> + ρ/2 |d̂ - d|² = ρ/2 |d|² - <μ + ρ d̂, d> + const
  return solve_prosumer_qp(params, rho, -(mu_n + rho * d_hat_n), "sync prosumer subproblem");
}

Matrix dual_update(const Matrix& mu, const Matrix& d_hat, const Matrix& d, double rho) {
  if (mu.rows() != d.rows() || mu.cols() != d.cols() || d_hat.rows() != d.rows() ||
      d_hat.cols() != d.cols())
    throw InvalidInput("dual_update: matrix shapes differ");
  return mu + rho * (d_hat - d);
}

Residuals residuals(const SyncState& state, const Matrix& prev_d_hat, double rho) {
  return {(state.d_hat - state.d).norm(), rho * (state.d_hat - prev_d_hat).norm()};
}

bool sync_converged(const SyncState& state, const Residuals& res, const HyperParams& hyper) {
  const double base = hyper.eps_abs * std::sqrt(static_cast<double>(state.d.size()));
  const double primal_tol = base + hyper.eps_rel * std::max(state.d_hat.norm(), state.d.norm());
  const double dual_tol = base + hyper.eps_rel * state.mu.norm();
  return res.primal < primal_tol && res.dual < dual_tol;
}

SyncResult run_sync(const Scenario& sc, const SyncOptions& options) {
  validate(sc);
  const int count = sc.size();
  const int horizon = sc.horizon;
  const HyperParams& hyper = sc.hyper;
  options.delays.validate(count);

  SyncState state;
  state.d = Matrix::Zero(count, horizon);
  if (options.initial_d) {
    if (options.initial_d->rows() != count || options.initial_d->cols() != horizon)
      throw InvalidInput("run_sync: initial_d has the wrong shape");
    state.d = *options.initial_d;
  }
  state.d_hat = state.d;
  state.mu = Matrix::Zero(count, horizon);

  DelaySampler sampler(options.delays);
  SyncResult result;
  std::vector<Schedule> schedules(static_cast<std::size_t>(count));
  double best = std::numeric_limits<double>::infinity();
  double sim_time = 0.0;

  for (int k = 1; k <= hyper.max_iter; ++k) {
    const Matrix prev_d_hat = state.d_hat;
    const AggregatorResult agg = aggregator_update(state.d, state.mu, hyper.rho, sc.prev_net_load);
    state.d_hat = agg.d_hat;
    state.gamma_val = agg.peak;
    state.r = agg.ramps;

    // Barrier: the iteration lasts as long as its slowest prosumer.
    double slowest = 0.0;
    for (int n = 0; n < count; ++n) {
      schedules[n] = prosumer_update(sc.prosumers[n], state.d_hat.row(n).transpose(),
                                     state.mu.row(n).transpose(), hyper.rho);
      state.d.row(n) = schedules[n].net_demand.transpose();
      slowest = std::max(slowest, sampler.draw(n));
    }
    sim_time += slowest;

    state.mu = dual_update(state.mu, state.d_hat, state.d, hyper.rho);
    state.iter = k;

    const Residuals res = residuals(state, prev_d_hat, hyper.rho);
    SystemSolution current = assemble(schedules, sc.prev_net_load);
    result.trace.push_back({k, sim_time, current.peak_ramp, res.primal, res.dual});
    result.iterations = k;

    const bool done = sync_converged(state, res, hyper);
    if (done || current.peak_ramp < best) {
      best = current.peak_ramp;
      result.solution = std::move(current);
    }
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

}  // namespace peakramp
