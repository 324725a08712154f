#include "timewarp/solver.hpp"

#include "timewarp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace timewarp {

namespace {

constexpr Eigen::Index kMinDefaultStages = 16;

struct SlopeBox {
  double lo;
  double hi;
};

// Shared refinement loop. `clip` narrows the initial bounds further (used by
// the symmetric solve).
template <typename Clip>
SolveResult refine_and_solve(const WarpProblem& problem, const Eigen::VectorXd& t,
                             const SolveParams& params, SlopeBox box, Clip&& clip) {
  const auto start = std::chrono::steady_clock::now();
  Bounds initial = compute_bounds(t, box.lo, box.hi, params.beta);
  clip(initial);
  Bounds bounds = initial;

  SolveResult result;
  std::optional<Eigen::VectorXd> anchor;
  PathResult best;
  for (int q = 0; q <= params.refinements; ++q) {
    if (q > 0) bounds = refine_bounds(bounds, best.tau, params.eta, initial);
    const Grid grid = build_grid(t, bounds, params.M, box.lo, box.hi, anchor);
    PathResult path = params.second_order ? shortest_path_second_order(problem, grid, params.dp)
                                          : shortest_path(problem, grid, params.dp);
    result.timing.node_seconds += path.node_seconds;
    result.timing.path_seconds += path.path_seconds;
    result.history.push_back(path.objective);
    const double previous = q > 0 ? best.objective : 0.0;
    best = std::move(path);
    anchor = best.tau;
    if (q > 0 && previous - best.objective <= params.min_relative_improvement * std::abs(previous)) {
      break;
    }
  }

  result.warp = WarpFunctionXd(t, best.tau);
  result.objective = best.objective;
  result.components = evaluate_objective(problem, t, best.tau, params.second_order);
  result.timing.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

void SolveParams::validate() const {
  if (M < 1) throw std::invalid_argument("M must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (refinements < 0) throw std::invalid_argument("refinements must be nonnegative");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (N && *N < 2) throw std::invalid_argument("N must be at least 2");
  if (stage_times) validate_stage_times(*stage_times);
  if (!(min_relative_improvement >= 0.0)) {
    throw std::invalid_argument("min_relative_improvement must be nonnegative");
  }
}

Eigen::VectorXd uniform_times(Eigen::Index n) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  t(0) = 0.0;
  t(n - 1) = 1.0;
  return t;
}

Eigen::VectorXd stage_times_for(const SignalXd& y, const SolveParams& params) {
  if (params.stage_times) return *params.stage_times;
  if (params.N) return uniform_times(*params.N);
  if (y.size() < kMinDefaultStages) return uniform_times(kMinDefaultStages);
  return y.knot_times();
}

ObjectiveBreakdown evaluate_objective(const WarpProblem& problem, const Eigen::VectorXd& t,
                                      const Eigen::VectorXd& tau, bool second_order) {
  if (t.size() != tau.size()) throw std::invalid_argument("evaluate_objective: length mismatch");
  const PenaltySpec& pen = problem.penalties;
  const RegularizerSpec reg2 = pen.reg_inst2.value_or(RegularizerSpec::square());
  ExtendedReal loss(0.0);
  ExtendedReal cum(0.0);
  ExtendedReal inst(0.0);
  ExtendedReal inst2(0.0);
  const Eigen::Index n = t.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double dt = t(i + 1) - t(i);
    const double y_time = problem.symmetric ? 2.0 * t(i) - tau(i) : t(i);
    loss += dt * ExtendedReal(loss_value(pen.loss, problem.x(tau(i)), problem.y(y_time), tau(i),
                                         t(i)));
    cum += dt * reg_cum_value(pen.reg_cum, tau(i) - t(i));
    inst += dt * reg_inst_value(pen.reg_inst, (tau(i + 1) - tau(i)) / dt);
    if (second_order && i >= 1) {
      const double d1 = t(i) - t(i - 1);
      inst2 += dt * reg_inst2_value(reg2, second_difference(tau(i - 1), tau(i), tau(i + 1), d1, dt));
    }
  }
  ExtendedReal total = loss + pen.lambda_cum * cum + pen.lambda_inst * inst;
  if (second_order) total += pen.lambda_inst2 * inst2;
  return {loss.value(), cum.value(), inst.value(), inst2.value(), total.value()};
}

SolveResult solve(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                  const SolveParams& params) {
  penalties.validate();
  params.validate();
  const Eigen::VectorXd t = stage_times_for(y, params);
  const WarpProblem problem{x, y, penalties, false};
  return refine_and_solve(problem, t, params, {penalties.slope_min(), penalties.slope_max()},
                          [](Bounds&) {});
}

double distance(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                const SolveParams& params) {
  return solve(x, y, penalties, params).objective;
}

double symmetric_distance(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                          const SolveParams& params) {
  return (distance(x, y, penalties, params) + distance(y, x, penalties, params)) / 2.0;
}

SymmetricSolveResult solve_symmetric(const SignalXd& x, const SignalXd& y,
                                     const PenaltySpec& penalties, const SolveParams& params) {
  penalties.validate();
  params.validate();
  // psi' = 2 - phi' must also lie in the box.
  const SlopeBox box{std::max(penalties.slope_min(), 2.0 - penalties.slope_max()),
                     std::min(penalties.slope_max(), 2.0 - penalties.slope_min())};
  if (!(box.lo < box.hi)) {
    throw InfeasibleError("slope box [" + std::to_string(penalties.slope_min()) + ", " +
                          std::to_string(penalties.slope_max()) +
                          "] admits no symmetric warp pair");
  }
  PenaltySpec pen = penalties;
  pen.reg_inst = pen.reg_inst.with_box(box.lo, box.hi);

  const Eigen::VectorXd t = stage_times_for(y, params);
  const WarpProblem problem{x, y, pen, true};
  SolveResult r = refine_and_solve(problem, t, params, box, [&t](Bounds& b) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      b.lower(i) = std::max(b.lower(i), 2.0 * t(i) - 1.0);
      b.upper(i) = std::min(b.upper(i), 2.0 * t(i));
      if (b.lower(i) > b.upper(i)) {
        throw InfeasibleError("empty symmetric warp range at stage " + std::to_string(i), i);
      }
    }
  });

  SymmetricSolveResult out;
  out.phi = r.warp;
  out.psi = WarpFunctionXd(t, 2.0 * t - r.warp.tau());
  out.objective = r.objective;
  out.components = r.components;
  out.history = std::move(r.history);
  return out;
}

Eigen::VectorXd softmax_from_distances(const Eigen::VectorXd& d, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (d.size() < 1) throw std::invalid_argument("need at least one distance");
  const double shift = d.maxCoeff();
  const Eigen::VectorXd e = ((d.array() - shift) / sigma).exp().matrix();
  return e / e.sum();
}

Eigen::VectorXd softmax_features(const SignalXd& x, std::span<const SignalXd> templates,
                                 double sigma, const PenaltySpec& penalties,
                                 const SolveParams& params) {
  if (templates.empty()) throw std::invalid_argument("need at least one template");
  Eigen::VectorXd d(static_cast<Eigen::Index>(templates.size()));
  for (size_t i = 0; i < templates.size(); ++i) {
    d(static_cast<Eigen::Index>(i)) = distance(x, templates[i], penalties, params);
  }
  return softmax_from_distances(d, sigma);
}

}  // namespace timewarp
