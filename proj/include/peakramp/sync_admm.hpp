#pragma once

// Synchronous consensus ADMM. Each iteration runs the aggregator update, then
// every prosumer update behind a barrier, then the dual update:
//
//   d̂ ← argmin Γ + <μ, d̂> + ρ/2 |d̂ - d|²     (ramp envelope on Σ_n d̂_n)
//   d_n ← argmin -<μ_n, d_n> + ρ/2 |d̂_n - d_n|²  over F_n
//   μ ← μ + ρ (d̂ - d)

#include "peakramp/aggregator.hpp"
#include "peakramp/delay_model.hpp"
#include "peakramp/model.hpp"

#include <optional>
#include <vector>

namespace peakramp {

struct SyncState {
  Matrix d;      // prosumer copies, N x T
  Matrix d_hat;  // aggregator copies
  Matrix mu;     // duals
  double gamma_val = 0.0;
  Vector r;
  int iter = 0;
};

struct SyncRecord {
  int iter = 0;
  double sim_time = 0.0;
  double objective = 0.0;  // peak ramp of the prosumer-side net load
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct SyncOptions {
  /// Starting prosumer copies; zero when absent. d̂ starts equal to d.
  std::optional<Matrix> initial_d;
  DelayModel delays;
};

struct SyncResult {
  SystemSolution solution;
  std::vector<SyncRecord> trace;
  SyncState state;
  bool converged = false;
  int iterations = 0;
};

Schedule prosumer_update(const ProsumerParams& params, const Vector& d_hat_n,
                         const Vector& mu_n, double rho);

Matrix dual_update(const Matrix& mu, const Matrix& d_hat, const Matrix& d, double rho);

struct Residuals {
  double primal = 0.0;  // |d̂ - d|_2
  double dual = 0.0;    // ρ |d̂ - d̂_prev|_2
};

Residuals residuals(const SyncState& state, const Matrix& prev_d_hat, double rho);

/// True when both residuals are under eps_abs * sqrt(N T) plus the relative
/// term (max(|d̂|, |d|) for primal, |μ| for dual).
bool sync_converged(const SyncState& state, const Residuals& res, const HyperParams& hyper);

/// Runs until the stopping rule holds or hyper.max_iter iterations. The
/// solution is built from prosumer-side schedules, so it is feasible at every
/// iterate; without convergence it is the iterate with the lowest peak ramp.
SyncResult run_sync(const Scenario& scenario, const SyncOptions& options = {});

}  // namespace peakramp
