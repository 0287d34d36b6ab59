#pragma once

// Aggregator subproblems of both ADMM variants.
//
// Each has the shape  minimize Γ + (w/2) Σ_n |d̂_n - c_n|²  subject to the
// ramp envelope on the column sums L̂[t] = Σ_n d̂_n[t]:
//
//   sync:   w = ρ, c_n = d_n - μ_n / ρ
//   async:  w = γ, c_n = -z_n / γ
//
// For fixed L̂ the inner minimizer is d̂_n = c_n + (L̂ - Σ_m c_m) / N, so the
// problem reduces to T + 1 variables (L̂, Γ) with objective
// Γ + (w / 2N) Σ_t (L̂[t] - Σ_m c_m[t])².

#include "peakramp/model.hpp"
#include "peakramp/qp_solver.hpp"

namespace peakramp {

struct AggregatorResult {
  double peak = 0.0;  // Γ
  Vector ramps;       // r, length T
  Matrix d_hat;       // N x T
};

struct ReducedAggregator {
  QpProblem qp;         // variables: L̂[0..T-1], then Γ
  Matrix targets;       // c, N x T
  Vector target_sums;   // Σ_n c_n[t]
  double prev_net_load = 0.0;

  Eigen::Index horizon() const { return target_sums.size(); }

  /// d̂ from the column sums L̂.
  Matrix expand(const Vector& load) const;

  /// Solves the reduced QP and expands the answer.
  AggregatorResult solve() const;
};

ReducedAggregator reduce_consensus(Matrix targets, double weight, double prev_net_load);

/// Sync form: targets d - μ/ρ, weight ρ.
ReducedAggregator reduce_aggregator(const Matrix& d, const Matrix& mu, double rho,
                                    double prev_net_load);

/// Async form: targets -z/γ, weight γ.
ReducedAggregator reduce_aggregator_async(const Matrix& z, double gamma, double prev_net_load);

AggregatorResult aggregator_update(const Matrix& d, const Matrix& mu, double rho,
                                   double prev_net_load);

AggregatorResult aggregator_update_async(const Matrix& z, double gamma, double prev_net_load);

/// The unreduced sync aggregator QP over (d̂, r, Γ), N*T + T + 1 variables:
/// Γ + Σ μ∘d̂ + (ρ/2)|d̂ - d|² with r[t] = L̂[t] - L̂[t-1] and -Γ <= r <= Γ.
QpProblem direct_aggregator_qp(const Matrix& d, const Matrix& mu, double rho,
                               double prev_net_load);

/// The unreduced async aggregator QP: Γ + Σ z∘d̂ + (γ/2)|d̂|².
QpProblem direct_aggregator_async_qp(const Matrix& z, double gamma, double prev_net_load);

/// Reads (Γ, r, d̂) from a solution of either direct QP.
AggregatorResult unpack_direct(const QpSolution& sol, Eigen::Index prosumers,
                               Eigen::Index horizon);

}  // namespace peakramp
