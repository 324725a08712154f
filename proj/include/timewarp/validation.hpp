#pragma once

/**
 * @file validation.hpp
 * @brief Out-of-sample validation of warp hyper-parameters.
 *
 * The stage times are split into train and test sets that both keep the
 * endpoints 0 and 1. The warp is fitted on the train times only and scored
 * on both sets with Riemann sums over each set's own spacing.
 */

#include "timewarp/solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace timewarp {

struct TimeSplit {
  Eigen::VectorXd train;
  Eigen::VectorXd test;
  std::uint64_t seed = 0;
};

/**
 * Random partition of the interior of t. round(test_fraction * (N - 2))
 * interior points (at least one, at most N - 3) go to the test set; both
 * sets are sorted and contain 0 and 1. Deterministic for a given seed.
 */
TimeSplit split_times(const Eigen::VectorXd& t, double test_fraction, std::uint64_t seed);

/// sum_{k < |s|-1} (s_{k+1} - s_k) L(x(phi(s_k)) - y(s_k)) over the times s.
double split_loss(const LossSpec& loss, const SignalXd& x, const SignalXd& y,
                  const WarpFunctionXd& phi, const Eigen::VectorXd& s);

struct TrainTestLosses {
  double train = 0.0;
  double test = 0.0;
  /// The warp fitted on the train times.
  SolveResult fit;
};

/// Fit on split.train (as stage times) and score on both sets.
TrainTestLosses train_test_losses(const SignalXd& x, const SignalXd& y,
                                  const PenaltySpec& penalties, const SolveParams& params,
                                  const TimeSplit& split);

struct WarpErrors {
  double train = 0.0;
  double test = 0.0;
};

/// sum over each set of (s_{k+1} - s_k) L(phi_true(s_k) - phi(s_k)).
WarpErrors warp_errors(const LossSpec& loss, const WarpFunctionXd& phi,
                       const WarpFunctionXd& phi_true, const TimeSplit& split);

struct ValidationReport {
  std::vector<double> lambda_cum;
  std::vector<double> lambda_inst;
  /// Rows index lambda_cum, columns lambda_inst. Failed cells hold +inf.
  Eigen::MatrixXd train_loss;
  Eigen::MatrixXd test_loss;
  std::optional<Eigen::MatrixXd> warp_error_train;
  std::optional<Eigen::MatrixXd> warp_error_test;
  /// (row, col) of the smallest test loss; ties go to the smaller index.
  std::pair<Eigen::Index, Eigen::Index> best_test_loss{0, 0};
  std::optional<std::pair<Eigen::Index, Eigen::Index>> best_warp_error;
};

/**
 * One train fit per (lambda_cum, lambda_inst) pair. When phi_true is given
 * the ground-truth warp errors are reported as well. Cells run in parallel.
 */
ValidationReport grid_search(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                             const SolveParams& params, const std::vector<double>& lambda_cum,
                             const std::vector<double>& lambda_inst, const TimeSplit& split,
                             const std::optional<WarpFunctionXd>& phi_true = std::nullopt);

/// n values spaced logarithmically from lo to hi (inclusive).
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace timewarp
