#pragma once

/**
 * @file dp.hpp
 * @brief Trellis costs and exact shortest paths over the candidate grid.
 *
 * With stage spacing dt_i = t_{i+1} - t_i the discretized objective is
 *
 *   f(tau) = sum_{i<N} dt_i * ( L(x(tau_i) - y(t_i)) + lc * Rcum(tau_i - t_i)
 *                               + li * Rinst((tau_{i+1} - tau_i) / dt_i) ).
 *
 * The first two terms are node costs and the last is an edge cost; the last
 * stage carries no node cost. Any path from the first row to the last row is
 * a discretized warp and its total cost equals f(tau).
 */

#include "timewarp/errors.hpp"
#include "timewarp/extended_real.hpp"
#include "timewarp/grid.hpp"
#include "timewarp/penalty.hpp"
#include "timewarp/signal.hpp"

#include <Eigen/Core>

#include <limits>
#include <string>

namespace timewarp {

/// A warping problem: warp x onto the target y under the given penalties.
struct WarpProblem {
  const SignalXd& x;
  const SignalXd& y;
  const PenaltySpec& penalties;
  /// Symmetric mode compares x(tau) with y(2t - tau).
  bool symmetric = false;
};

struct DpOptions {
  /// Precompute the (N-1) x M x M edge costs before the sweep instead of
  /// evaluating them on the fly. Faster for cheap losses, costs memory.
  bool materialize_edges = false;
  /// Refuse second-order solves with more candidates per stage than this.
  Eigen::Index second_order_max_candidates = 30;
};

/// Cost tables and back pointers of a completed forward sweep.
struct Trellis {
  Eigen::ArrayXXd node_cost;  // N x M
  Eigen::ArrayXXd value;      // N x M cost-to-come
  Eigen::ArrayXXi back;       // N x M predecessor index, -1 where none
};

struct PathResult {
  Eigen::VectorXd tau;
  Eigen::VectorXi index;
  double objective = std::numeric_limits<double>::infinity();
  double node_seconds = 0.0;
  double path_seconds = 0.0;
};

namespace detail {

inline double edge_cost_raw(const RegularizerSpec& reg, double weight, double from, double to,
                            double dt) {
  return (weight * reg_inst_value(reg, (to - from) / dt)).value();
}

}  // namespace detail

/// Node cost of candidate j at stage i (zero at the last stage).
ExtendedReal node_cost(const WarpProblem& problem, const Grid& grid, Eigen::Index i,
                       Eigen::Index j);

/// Cost of the edge from candidate j at stage i to candidate k at stage i+1.
ExtendedReal edge_cost(const WarpProblem& problem, const Grid& grid, Eigen::Index i,
                       Eigen::Index j, Eigen::Index k);

/// All node costs of the grid as an N x M array (+inf for infeasible nodes).
Eigen::ArrayXXd node_costs(const WarpProblem& problem, const Grid& grid);

/**
 * Forward dynamic programming over precomputed node costs.
 *
 * `edge(i, j, k)` returns the raw edge cost (a double, +inf if infeasible).
 * Every candidate of the first row is an admissible start and the cheapest
 * candidate of the last row is the end. Ties go to the smaller index.
 * Throws InfeasibleError if no finite path exists.
 */
template <typename EdgeCost>
Eigen::VectorXi forward_pass(Trellis& trellis, EdgeCost&& edge, double& objective) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = trellis.node_cost.rows();
  const Eigen::Index m = trellis.node_cost.cols();
  trellis.value.setConstant(n, m, inf);
  trellis.back.setConstant(n, m, -1);
  trellis.value.row(0) = trellis.node_cost.row(0);

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      double best = inf;
      int arg = -1;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double v = trellis.value(i, j);
        if (v == inf) continue;
        const double c = saturating_add(v, edge(i, j, k));
        if (c < best) {
          best = c;
          arg = static_cast<int>(j);
        }
      }
      trellis.value(i + 1, k) = saturating_add(best, trellis.node_cost(i + 1, k));
      trellis.back(i + 1, k) = arg;
    }
  }

  Eigen::Index end = 0;
  for (Eigen::Index k = 1; k < m; ++k) {
    if (trellis.value(n - 1, k) < trellis.value(n - 1, end)) end = k;
  }
  objective = trellis.value(n - 1, end);
  if (objective == inf) {
    // Report the first stage that no path reaches.
    Eigen::Index dead = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((trellis.value.row(i) == inf).all()) {
        dead = i;
        break;
      }
    }
    throw InfeasibleError("no feasible warp path: stage " + std::to_string(dead) +
                              " is unreachable",
                          dead);
  }

  Eigen::VectorXi path(n);
  path(n - 1) = static_cast<int>(end);
  for (Eigen::Index i = n - 1; i > 0; --i) path(i - 1) = trellis.back(i, path(i));
  return path;
}

/// Exact minimum of the discretized objective over all candidate paths.
PathResult shortest_path(const WarpProblem& problem, const Grid& grid,
                         const DpOptions& options = {});

/// Three-point second derivative on uneven spacing, d1 = t_i - t_{i-1}, d2 = t_{i+1} - t_i.
inline double second_difference(double tau_prev, double tau, double tau_next, double d1,
                                double d2) {
  return 2.0 * (d1 * tau_next - (d1 + d2) * tau + d2 * tau_prev) / (d1 * d2 * (d1 + d2));
}

/// Three-point second derivative on even spacing h.
inline double second_difference_even(double tau_prev, double tau, double tau_next, double h) {
  return (tau_next - 2.0 * tau + tau_prev) / (h * h);
}

/**
 * Exact minimum of the objective extended with
 * dt_i * lambda_inst2 * Rinst2(phi''(t_i)) for interior stages. The DP state
 * is the pair (previous candidate, current candidate), so cost is O(N M^3).
 * Throws std::invalid_argument if M exceeds options.second_order_max_candidates.
 */
PathResult shortest_path_second_order(const WarpProblem& problem, const Grid& grid,
                                      const DpOptions& options = {});

}  // namespace timewarp
