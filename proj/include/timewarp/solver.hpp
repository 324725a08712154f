#pragma once

/**
 * @file solver.hpp
 * @brief Full warp solve: bounds, grid, DP and iterative refinement.
 */

#include "timewarp/dp.hpp"
#include "timewarp/grid.hpp"
#include "timewarp/penalty.hpp"
#include "timewarp/signal.hpp"
#include "timewarp/warp_function.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace timewarp {

struct SolveParams {
  /// Uniform stage count. Ignored when stage_times is set. When neither is
  /// set the target's sample times are used (uniform 16 if it has fewer).
  std::optional<Eigen::Index> N;
  std::optional<Eigen::VectorXd> stage_times;
  /// Candidates per stage.
  Eigen::Index M = 100;
  /// Range shrink factor per refinement.
  double eta = 0.15;
  int refinements = 3;
  /// Boundary margin for partial alignment; 0 pins phi(0)=0 and phi(1)=1.
  double beta = 0.0;
  bool second_order = false;
  /// Stop refining once an iteration improves the objective by no more than
  /// this fraction.
  double min_relative_improvement = 1e-7;
  DpOptions dp;

  void validate() const;
};

/// Objective terms at a discretized warp. Regularizer components are
/// unweighted; total = loss + lambda_cum*cum + lambda_inst*inst (+ lambda_inst2*inst2).
struct ObjectiveBreakdown {
  double loss = 0.0;
  double cum = 0.0;
  double inst = 0.0;
  double inst2 = 0.0;
  double total = 0.0;
};

struct SolveTiming {
  double node_seconds = 0.0;
  double path_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SolveResult {
  WarpFunctionXd warp;
  double objective = 0.0;
  ObjectiveBreakdown components;
  /// Objective after the initial solve and after each refinement.
  std::vector<double> history;
  SolveTiming timing;
};

struct SymmetricSolveResult {
  WarpFunctionXd phi;
  /// psi(t) = 2t - phi(t).
  WarpFunctionXd psi;
  double objective = 0.0;
  ObjectiveBreakdown components;
  std::vector<double> history;
};

/// Stage times a solve of onto target y would use.
Eigen::VectorXd stage_times_for(const SignalXd& y, const SolveParams& params);

/// Uniform grid 0 = t_1 < ... < t_n = 1.
Eigen::VectorXd uniform_times(Eigen::Index n);

/**
 * Discretized objective of the warp tau at stage times t, recomputed directly
 * from the signals. Includes the second-derivative term when
 * `second_order` is set.
 */
ObjectiveBreakdown evaluate_objective(const WarpProblem& problem, const Eigen::VectorXd& t,
                                      const Eigen::VectorXd& tau, bool second_order = false);

/// Warp x onto y. Throws InfeasibleError or std::invalid_argument.
SolveResult solve(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                  const SolveParams& params = {});

/// Time-warped distance D(x, y): the optimal objective. Not symmetric.
double distance(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                const SolveParams& params = {});

/// (D(x, y) + D(y, x)) / 2.
double symmetric_distance(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                          const SolveParams& params = {});

/**
 * Symmetric bidirectional warp: x(phi(t)) ~ y(psi(t)) with psi(t) = 2t - phi(t).
 * The slope box on phi is intersected with the one psi needs, and tau is
 * restricted to [2t - 1, 2t] so psi stays in [0, 1].
 */
SymmetricSolveResult solve_symmetric(const SignalXd& x, const SignalXd& y,
                                     const PenaltySpec& penalties, const SolveParams& params = {});

/**
 * Features z_i = exp(d_i / sigma) / sum_j exp(d_j / sigma) with d_i = D(x, y_i).
 * The exponent is positive, so larger distances get larger weight.
 */
Eigen::VectorXd softmax_features(const SignalXd& x, std::span<const SignalXd> templates,
                                 double sigma, const PenaltySpec& penalties,
                                 const SolveParams& params = {});

/// The normalization used by softmax_features, on precomputed distances.
Eigen::VectorXd softmax_from_distances(const Eigen::VectorXd& d, double sigma);

}  // namespace timewarp
