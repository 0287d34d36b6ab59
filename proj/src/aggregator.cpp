#include "peakramp/aggregator.hpp"

#include "peakramp/prosumer_program.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace peakramp {

namespace {

void require_positive(double w, const char* name) {
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput(std::string(name) + " must be positive");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput(std::string(what) + ": matrix shapes differ");
}

// Envelope rows over the column sums: ±(L̂[t] - L̂[t-1]) - Γ <= 0 with
// L̂[-1] = prev. `load_col(t)` gives the term(s) of L̂[t].
template <typename AddLoad>
void append_envelope(ProgramBuilder& b, Eigen::Index horizon, Eigen::Index ramp_col,
                     Eigen::Index peak_col, double prev, AddLoad&& add_load) {
  for (Eigen::Index t = 0; t < horizon; ++t) {
    for (double sign : {1.0, -1.0}) {
      const auto row = b.add_ineq(t == 0 ? sign * prev : 0.0);
      if (ramp_col >= 0) {
        b.ineq(row, ramp_col + t, sign);
      } else {
        add_load(row, t, sign);
        if (t > 0) add_load(row, t - 1, -sign);
      }
      b.ineq(row, peak_col, -1.0);
    }
  }
}

#ifndef NDEBUG
// Debug builds cross-check one in every 100 reduced solves against the
// unreduced QP.
void audit(const AggregatorResult& reduced, const QpProblem& direct, Eigen::Index prosumers,
           Eigen::Index horizon) {
  static std::atomic<long> calls{0};
  if (calls.fetch_add(1) % 100 != 0) return;
  const auto check = unpack_direct(solve_qp_or_throw(direct, "aggregator audit"), prosumers, horizon);
  const double gap = std::max(std::abs(check.peak - reduced.peak),
                              (check.d_hat - reduced.d_hat).cwiseAbs().maxCoeff());
  if (gap > 1e-6) {
    std::ostringstream msg;
    msg << "aggregator reduction audit failed: gap " << gap;
    throw std::logic_error(msg.str());
  }
}
#endif

}  // namespace

Matrix ReducedAggregator::expand(const Vector& load) const {
  const double n = static_cast<double>(targets.rows());
  const Eigen::RowVectorXd share = ((load - target_sums) / n).transpose();
  return targets.rowwise() + share;
}

AggregatorResult ReducedAggregator::solve() const {
  const QpSolution sol = solve_qp_or_throw(qp, "aggregator subproblem");
  const Eigen::Index t = horizon();
  const Vector load = sol.primal.head(t);
  AggregatorResult out;
  out.peak = sol.primal[t];
  out.ramps = ramp_vector(load, prev_net_load);
  out.d_hat = expand(load);
  return out;
}

ReducedAggregator reduce_consensus(Matrix targets, double weight, double prev) {
  require_positive(weight, "aggregator penalty");
  if (targets.rows() < 1 || targets.cols() < 1) throw InvalidInput("aggregator: empty state");
  if (!targets.allFinite()) throw InvalidInput("aggregator: non-finite state");
  const Eigen::Index horizon = targets.cols();
  const double n = static_cast<double>(targets.rows());

  ReducedAggregator out;
  out.target_sums = targets.colwise().sum().transpose();
  out.targets = std::move(targets);
  out.prev_net_load = prev;

  ProgramBuilder b(horizon + 1);
  append_envelope(b, horizon, -1, horizon, prev,
                  [&](Eigen::Index row, Eigen::Index t, double coeff) { b.ineq(row, t, coeff); });
  std::vector<Triplet> trips;
  for (Eigen::Index t = 0; t < horizon; ++t) trips.emplace_back(t, t, weight / n);
  SparseMatrix quad(horizon + 1, horizon + 1);
  quad.setFromTriplets(trips.begin(), trips.end());
  Vector lin(horizon + 1);
  lin.head(horizon) = -(weight / n) * out.target_sums;
  lin[horizon] = 1.0;
  out.qp = b.finish(std::move(quad), std::move(lin));
  return out;
}

ReducedAggregator reduce_aggregator(const Matrix& d, const Matrix& mu, double rho, double prev) {
  require_positive(rho, "rho");
  require_same_shape(d, mu, "aggregator_update");
  return reduce_consensus(d - mu / rho, rho, prev);
}

ReducedAggregator reduce_aggregator_async(const Matrix& z, double gamma, double prev) {
  require_positive(gamma, "gamma");
  return reduce_consensus(-z / gamma, gamma, prev);
}

AggregatorResult aggregator_update(const Matrix& d, const Matrix& mu, double rho, double prev) {
  auto result = reduce_aggregator(d, mu, rho, prev).solve();
#ifndef NDEBUG
  audit(result, direct_aggregator_qp(d, mu, rho, prev), d.rows(), d.cols());
#endif
  return result;
}

AggregatorResult aggregator_update_async(const Matrix& z, double gamma, double prev) {
  auto result = reduce_aggregator_async(z, gamma, prev).solve();
#ifndef NDEBUG
  audit(result, direct_aggregator_async_qp(z, gamma, prev), z.rows(), z.cols());
#endif
  return result;
}

namespace {

// Variables: d̂ row-major by prosumer (n*T + t), then r (T), then Γ.
QpProblem direct_qp(Eigen::Index prosumers, Eigen::Index horizon, double weight,
                    const Matrix& lin_dhat, double prev) {
  const Eigen::Index nd = prosumers * horizon;
  const Eigen::Index ramp_col = nd;
  const Eigen::Index peak_col = nd + horizon;
  ProgramBuilder b(nd + horizon + 1);
  // r[t] - Σ_n d̂_n[t] + Σ_n d̂_n[t-1] = 0 (prev at t = 0)
  for (Eigen::Index t = 0; t < horizon; ++t) {
    const auto row = b.add_eq(t == 0 ? -prev : 0.0);
    b.eq(row, ramp_col + t, 1.0);
    for (Eigen::Index n = 0; n < prosumers; ++n) {
      b.eq(row, n * horizon + t, -1.0);
      if (t > 0) b.eq(row, n * horizon + t - 1, 1.0);
    }
  }
  append_envelope(b, horizon, ramp_col, peak_col, 0.0, [](Eigen::Index, Eigen::Index, double) {});

  std::vector<Triplet> trips;
  for (Eigen::Index i = 0; i < nd; ++i) trips.emplace_back(i, i, weight);
  SparseMatrix quad(nd + horizon + 1, nd + horizon + 1);
  quad.setFromTriplets(trips.begin(), trips.end());
  Vector lin = Vector::Zero(nd + horizon + 1);
  for (Eigen::Index n = 0; n < prosumers; ++n)
    for (Eigen::Index t = 0; t < horizon; ++t) lin[n * horizon + t] = lin_dhat(n, t);
  lin[peak_col] = 1.0;
  return b.finish(std::move(quad), std::move(lin));
}

}  // namespace

QpProblem direct_aggregator_qp(const Matrix& d, const Matrix& mu, double rho, double prev) {
  require_positive(rho, "rho");
  require_same_shape(d, mu, "direct_aggregator_qp");
  // Σ μ d̂ + ρ/2 |d̂ - d|² = ρ/2 |d̂|² + (μ - ρ d)'d̂ + const
  return direct_qp(d.rows(), d.cols(), rho, mu - rho * d, prev);
}

QpProblem direct_aggregator_async_qp(const Matrix& z, double gamma, double prev) {
  require_positive(gamma, "gamma");
  return direct_qp(z.rows(), z.cols(), gamma, z, prev);
}

AggregatorResult unpack_direct(const QpSolution& sol, Eigen::Index prosumers,
                               Eigen::Index horizon) {
  const Eigen::Index nd = prosumers * horizon;
  AggregatorResult out;
  out.d_hat.resize(prosumers, horizon);
  for (Eigen::Index n = 0; n < prosumers; ++n)
    for (Eigen::Index t = 0; t < horizon; ++t) out.d_hat(n, t) = sol.primal[n * horizon + t];
  out.ramps = sol.primal.segment(nd, horizon);
  out.peak = sol.primal[nd + horizon];
  return out;
}

}  // namespace peakramp
