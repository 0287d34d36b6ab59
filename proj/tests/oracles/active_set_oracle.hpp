#pragma once

// Brute-force reference for small box-constrained QPs with one equality row:
// enumerate every assignment of each variable to {free, at lower, at upper},
// solve the equality-constrained KKT system on the free block, keep the
// feasible candidates, and return the smallest objective. Independent of the
// interior-point code path; only used by tests.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace oracle {

struct BoxQp {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  Eigen::VectorXd eq_row;  // a, single equality a'x = b
  double eq_rhs = 0.0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(quad * x) + lin.dot(x);
  }
};

inline std::optional<double> enumerate_active_sets(const BoxQp& p) {
  const int n = static_cast<int>(p.lin.size());
  long combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<int> state(n);
  for (long code = 0; code < combos; ++code) {
    long c = code;
    std::vector<int> free_idx;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 0) free_idx.push_back(i);
      if (state[i] == 1) x[i] = p.lower[i];
      if (state[i] == 2) x[i] = p.upper[i];
    }
    const int f = static_cast<int>(free_idx.size());
    if (f > 0) {
      Eigen::MatrixXd k = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs(f + 1);
      double eq_fixed = 0.0;
      for (int i = 0; i < n; ++i)
        if (state[i] != 0) eq_fixed += p.eq_row[i] * x[i];
      for (int a = 0; a < f; ++a) {
        const int i = free_idx[a];
        for (int b = 0; b < f; ++b) k(a, b) = p.quad(i, free_idx[b]);
        k(a, f) = p.eq_row[i];
        k(f, a) = p.eq_row[i];
        double r = -p.lin[i];
        for (int j = 0; j < n; ++j)
          if (state[j] != 0) r -= p.quad(i, j) * x[j];
        rhs[a] = r;
      }
      rhs[f] = p.eq_rhs - eq_fixed;
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(k);
      const Eigen::VectorXd sol = cod.solve(rhs);
      if ((k * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()))
        continue;  // restricted problem unbounded or inconsistent
      for (int a = 0; a < f; ++a) x[free_idx[a]] = sol[a];
    }
    bool feasible = std::abs(p.eq_row.dot(x) - p.eq_rhs) <= 1e-9;
    for (int i = 0; i < n && feasible; ++i)
      feasible = x[i] >= p.lower[i] - 1e-9 && x[i] <= p.upper[i] + 1e-9;
    if (!feasible) continue;
    found = true;
    best = std::min(best, p.objective(x));
  }
  if (!found) return std::nullopt;
  return best;
}

/// Random PSD instance: Q = B'B with rank in [0, n] (rank 0 gives an LP),
/// box around the origin, one equality satisfied by an interior point.
inline BoxQp random_box_qp(std::mt19937_64& rng, int n, bool linear_only = false) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> rank_dist(0, n);
  BoxQp p;
  const int rank = linear_only ? 0 : rank_dist(rng);
  Eigen::MatrixXd b(rank, n);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = 2.0 * unit(rng);
  p.quad = rank > 0 ? Eigen::MatrixXd(b.transpose() * b) : Eigen::MatrixXd::Zero(n, n);
  p.lin.resize(n);
  p.eq_row.resize(n);
  p.lower.resize(n);
  p.upper.resize(n);
  Eigen::VectorXd interior(n);
  for (int j = 0; j < n; ++j) {
    p.lin[j] = 3.0 * unit(rng);
    p.eq_row[j] = unit(rng);
    p.lower[j] = -1.5 + 0.5 * unit(rng);
    p.upper[j] = 1.5 + 0.5 * unit(rng);
    interior[j] = 0.5 * unit(rng);
  }
  p.eq_rhs = p.eq_row.dot(interior);
  return p;
}

}  // namespace oracle
