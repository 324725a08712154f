#include "timewarp/dp.hpp"

#include <chrono>
#include <stdexcept>
#include <vector>

namespace timewarp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double node_cost_raw(const WarpProblem& p, const Grid& g, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = g.stages();
  if (i == n - 1) return 0.0;
  const double t = g.t(i);
  const double tau = g.tau(i, j);
  const double dt = g.t(i + 1) - t;
  const PenaltySpec& pen = p.penalties;
  const double y_time = p.symmetric ? 2.0 * t - tau : t;
  const ExtendedReal loss(loss_value(pen.loss, p.x(tau), p.y(y_time), tau, t));
  const ExtendedReal cum = pen.lambda_cum * reg_cum_value(pen.reg_cum, tau - t);
  return (dt * (loss + cum)).value();
}

PathResult make_result(const Grid& g, const Eigen::VectorXi& path, double objective) {
  PathResult r;
  r.index = path;
  r.objective = objective;
  r.tau.resize(path.size());
  for (Eigen::Index i = 0; i < path.size(); ++i) r.tau(i) = g.tau(i, path(i));
  return r;
}

void check_grid(const WarpProblem& p, const Grid& g) {
  if (g.stages() < 2) throw std::invalid_argument("grid needs at least 2 stages");
  if (g.t.size() != g.stages()) throw std::invalid_argument("grid t and tau disagree");
  if (p.x.dim() != p.y.dim()) {
    throw std::invalid_argument("signal dimensions differ: x has " + std::to_string(p.x.dim()) +
                                ", y has " + std::to_string(p.y.dim()));
  }
}

}  // namespace

ExtendedReal node_cost(const WarpProblem& problem, const Grid& grid, Eigen::Index i,
                       Eigen::Index j) {
  return ExtendedReal(node_cost_raw(problem, grid, i, j));
}

ExtendedReal edge_cost(const WarpProblem& problem, const Grid& grid, Eigen::Index i,
                       Eigen::Index j, Eigen::Index k) {
  const double dt = grid.t(i + 1) - grid.t(i);
  const PenaltySpec& pen = problem.penalties;
  return ExtendedReal(detail::edge_cost_raw(pen.reg_inst, dt * pen.lambda_inst, grid.tau(i, j),
                                            grid.tau(i + 1, k), dt));
}

Eigen::ArrayXXd node_costs(const WarpProblem& problem, const Grid& grid) {
  Eigen::ArrayXXd out(grid.stages(), grid.candidates());
  for (Eigen::Index i = 0; i < grid.stages(); ++i) {
    for (Eigen::Index j = 0; j < grid.candidates(); ++j) {
      out(i, j) = node_cost_raw(problem, grid, i, j);
    }
  }
  return out;
}

PathResult shortest_path(const WarpProblem& problem, const Grid& grid, const DpOptions& options) {
  check_grid(problem, grid);
  const auto t0 = Clock::now();
  Trellis trellis;
  trellis.node_cost = node_costs(problem, grid);
  const double node_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  const Eigen::Index n = grid.stages();
  const Eigen::Index m = grid.candidates();
  const RegularizerSpec& reg = problem.penalties.reg_inst;
  const double lambda = problem.penalties.lambda_inst;
  Eigen::VectorXd dt = grid.t.tail(n - 1) - grid.t.head(n - 1);

  double objective = 0.0;
  Eigen::VectorXi path;
  if (options.materialize_edges) {
    std::vector<double> edges(static_cast<size_t>((n - 1) * m * m));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
          edges[static_cast<size_t>((i * m + j) * m + k)] = detail::edge_cost_raw(
              reg, dt(i) * lambda, grid.tau(i, j), grid.tau(i + 1, k), dt(i));
        }
      }
    }
    path = forward_pass(
        trellis,
        [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
          return edges[static_cast<size_t>((i * m + j) * m + k)];
        },
        objective);
  } else {
    path = forward_pass(
        trellis,
        [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
          return detail::edge_cost_raw(reg, dt(i) * lambda, grid.tau(i, j), grid.tau(i + 1, k),
                                       dt(i));
        },
        objective);
  }

  PathResult r = make_result(grid, path, objective);
  r.node_seconds = node_seconds;
  r.path_seconds = seconds_since(t1);
  return r;
}

PathResult shortest_path_second_order(const WarpProblem& problem, const Grid& grid,
                                      const DpOptions& options) {
  check_grid(problem, grid);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = grid.stages();
  const Eigen::Index m = grid.candidates();
  if (m > options.second_order_max_candidates) {
    throw std::invalid_argument("second-order solve with M=" + std::to_string(m) +
                                " exceeds the cap of " +
                                std::to_string(options.second_order_max_candidates) +
                                " candidates per stage (cost grows as N*M^3)");
  }

  const auto t0 = Clock::now();
  const Eigen::ArrayXXd node = node_costs(problem, grid);
  const double node_seconds = seconds_since(t0);
  const auto t1 = Clock::now();

  const PenaltySpec& pen = problem.penalties;
  const RegularizerSpec reg2 = pen.reg_inst2.value_or(RegularizerSpec::square());
  auto edge = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    const double dt = grid.t(i + 1) - grid.t(i);
    return detail::edge_cost_raw(pen.reg_inst, dt * pen.lambda_inst, grid.tau(i, j),
                                 grid.tau(i + 1, k), dt);
  };

  if (n == 2) {
    Trellis trellis;
    trellis.node_cost = node;
    double objective = 0.0;
    const Eigen::VectorXi path = forward_pass(trellis, edge, objective);
    PathResult r = make_result(grid, path, objective);
    r.node_seconds = node_seconds;
    r.path_seconds = seconds_since(t1);
    return r;
  }

  // value(p, c): best cost of a path whose last two candidates are p (stage
  // i-1) and c (stage i), including node cost at i.
  Eigen::ArrayXXd value(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index c = 0; c < m; ++c) {
      value(p, c) = saturating_add(saturating_add(node(0, p), edge(0, p, c)), node(1, c));
    }
  }
  // back[i](c, nxt) = best p for state (c, nxt) at stage i.
  std::vector<Eigen::ArrayXXi> back(static_cast<size_t>(n), Eigen::ArrayXXi());
  Eigen::ArrayXXd next(m, m);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double d1 = grid.t(i) - grid.t(i - 1);
    const double d2 = grid.t(i + 1) - grid.t(i);
    const double w2 = d2 * pen.lambda_inst2;
    Eigen::ArrayXXi& bp = back[static_cast<size_t>(i + 1)];
    bp.setConstant(m, m, -1);
    next.setConstant(inf);
    for (Eigen::Index c = 0; c < m; ++c) {
      const double tau_c = grid.tau(i, c);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double tau_k = grid.tau(i + 1, k);
        const double e = edge(i, c, k);
        if (e == inf) continue;
        double best = inf;
        int arg = -1;
        for (Eigen::Index p = 0; p < m; ++p) {
          const double v = value(p, c);
          if (v == inf) continue;
          const double curv = second_difference(grid.tau(i - 1, p), tau_c, tau_k, d1, d2);
          const double cand = saturating_add(v, (w2 * reg_inst2_value(reg2, curv)).value());
          if (cand < best) {
            best = cand;
            arg = static_cast<int>(p);
          }
        }
        next(c, k) = saturating_add(saturating_add(best, e), node(i + 1, k));
        bp(c, k) = arg;
      }
    }
    value.swap(next);
  }

  Eigen::Index best_p = 0;
  Eigen::Index best_c = 0;
  double objective = inf;
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index c = 0; c < m; ++c) {
      if (value(p, c) < objective) {
        objective = value(p, c);
        best_p = p;
        best_c = c;
      }
    }
  }
  if (objective == inf) {
    throw InfeasibleError("no feasible warp path for the second-order problem", n - 1);
  }
  Eigen::VectorXi path(n);
  path(n - 1) = static_cast<int>(best_c);
  path(n - 2) = static_cast<int>(best_p);
  for (Eigen::Index i = n - 1; i >= 2; --i) {
    path(i - 2) = back[static_cast<size_t>(i)](path(i - 1), path(i));
  }

  PathResult r = make_result(grid, path, objective);
  r.node_seconds = node_seconds;
  r.path_seconds = seconds_since(t1);
  return r;
}

}  // namespace timewarp
