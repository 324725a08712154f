#pragma once

/**
 * @file alignment.hpp
 * @brief Group alignment to a learned target, centering, and time-warped
 *        K-means clustering.
 *
 * All three alternate between blocks that can each be minimized exactly or
 * kept unchanged: per-signal warps (DP solve against the current target),
 * the target itself (per-stage statistic), and for clustering the
 * assignments. A block update is only accepted where it does not increase
 * the objective, so the uncentered round objective never increases.
 */

#include "timewarp/solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace timewarp {

struct AlignmentResult {
  /// Target mu, sampled on the stage grid.
  SignalXd target;
  /// One warp per input signal, knots on the stage grid.
  std::vector<WarpFunctionXd> warps;
  /// Group objective after each round.
  std::vector<double> history;
  /// Warps after each round (history.size() entries).
  std::vector<std::vector<WarpFunctionXd>> warps_per_round;
  int rounds = 0;
};

struct ClusterResult {
  /// Zero-based cluster index per signal.
  std::vector<int> assignments;
  std::vector<SignalXd> templates;
  std::vector<WarpFunctionXd> warps;
  std::vector<double> history;
  int rounds = 0;
};

/// Stage grid shared by a group: params.stage_times, else uniform params.N,
/// else uniform with max(16, longest signal) points.
Eigen::VectorXd group_stage_times(std::span<const SignalXd> signals, const SolveParams& params);

/**
 * Value minimizing sum_i L(values.row(i) - mu) for one stage: the mean for
 * squared loss, the coordinate-wise median for l1, and a bracketed 1-D
 * search per coordinate (tolerance 1e-8) for the other kinds.
 * `taus` and `t` are forwarded to custom losses.
 */
Eigen::VectorXd update_target(const Eigen::MatrixXd& values, const LossSpec& loss,
                              const Eigen::VectorXd& taus, double t);
Eigen::VectorXd update_target(const Eigen::MatrixXd& values, const LossSpec& loss);

/**
 * Compose each warp with the inverse of the group mean m(t) = mean_i phi_i(t).
 * The result is exact for piecewise-linear warps: the returned family has
 * knots at m(s) for every knot s of every input, and its mean is the identity.
 * Throws std::invalid_argument if m is not strictly increasing.
 */
std::vector<WarpFunctionXd> recenter(std::span<const WarpFunctionXd> warps);

/// max over pairs (i, j) and probe times of |phi_i(phi_j^{-1}(s)) - s|.
double max_pairwise_inconsistency(std::span<const WarpFunctionXd> warps, int probes = 1000);

/**
 * Time-warped group alignment. With `centered` set, warps are recentered
 * after every warp update so their mean is the identity.
 */
AlignmentResult align(std::span<const SignalXd> signals, const PenaltySpec& penalties,
                      const SolveParams& params, int rounds, bool centered = false);

/**
 * Time-warped K-means. Templates start from K signals picked by seeded
 * k-means++ sampling under the time-warped distance; an empty cluster is
 * reseeded with the worst-fitting signal. K = 1 follows exactly the same
 * steps as uncentered align().
 */
ClusterResult cluster(std::span<const SignalXd> signals, int K, const PenaltySpec& penalties,
                      const SolveParams& params, int rounds, std::uint64_t seed);

}  // namespace timewarp
