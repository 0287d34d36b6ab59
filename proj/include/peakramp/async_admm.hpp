#pragma once

// Asynchronous ADMM driven by a discrete-event simulation of prosumer compute
// times. A prosumer's computation works from the z_n and d̂_n it held when the
// computation started:
//
//   w_g = z_n + γ d̂_n
//   d_n = argmin -<2 w_g - z_n, d> + γ/2 |d|²  over F_n
//   w_f = 2 w_g - z_n - γ d_n
//   z_n ← z_n + η (w_f - w_g)
//
// When it finishes, z_n is written to the aggregator's memory, the aggregator
// re-solves with all current z, sends the fresh d̂_n back to that prosumer
// only, and the prosumer starts its next computation after a sampled delay.
// Equal timestamps are processed in ascending prosumer index.

#include "peakramp/aggregator.hpp"
#include "peakramp/delay_model.hpp"
#include "peakramp/model.hpp"

#include <vector>

namespace peakramp {

struct AsyncStep {
  Vector w_g;
  Vector w_f;
  Vector z_new;
  Schedule schedule;
};

AsyncStep prosumer_step_async(const ProsumerParams& params, const Vector& d_hat_n,
                              const Vector& z_n, double gamma, double eta);

/// |z_new - z_prev|_2 / (η γ); for one step this equals |d̂_n - d_n|_2.
double async_residual(const Vector& z_prev, const Vector& z_new, double eta, double gamma);

struct AsyncEvent {
  double time = 0.0;
  int prosumer = 0;

  /// Earliest time first, then lowest prosumer index.
  bool operator>(const AsyncEvent& other) const {
    return time != other.time ? time > other.time : prosumer > other.prosumer;
  }
};

struct AsyncState {
  Matrix z;      // aggregator memory, N x T
  Matrix d_hat;  // row n is the copy last sent to prosumer n
  Matrix plan;   // row n is prosumer n's latest net demand
  double gamma_val = 0.0;
  long k = 0;    // processed arrivals
  double sim_time = 0.0;
};

struct AsyncRecord {
  long event = 0;
  double sim_time = 0.0;
  int prosumer = 0;
  double objective = 0.0;    // peak ramp of the prosumers' latest plans
  double fp_residual = 0.0;  // moving average of async_residual over the last N events
};

struct AsyncResult {
  SystemSolution solution;
  std::vector<AsyncRecord> trace;
  AsyncState state;
  bool converged = false;
  long events = 0;
};

/// Stops once a full window of N events has a mean residual below
/// hyper.eps_rel and an objective spread below hyper.eps_rel relative to the
/// latest objective, or after hyper.max_events. Until a prosumer's first
/// arrival, its plan is the result of its first (in-flight) computation.
AsyncResult run_async(const Scenario& scenario, const DelayModel& delays = {});

}  // namespace peakramp
