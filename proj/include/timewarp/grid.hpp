#pragma once

/**
 * @file grid.hpp
 * @brief Per-stage candidate warp values for the trellis.
 *
 * Stage i (time t_i) may take one of M candidate values tau_ij, linearly
 * spaced in [l_i, u_i]. The bounds come from the slope box and shrink around
 * the previous optimum during iterative refinement.
 */

#include <Eigen/Core>

#include <optional>

namespace timewarp {

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd range() const { return upper - lower; }
};

struct Grid {
  Eigen::VectorXd t;
  Bounds bounds;
  /// N x M, row i holds the sorted candidates for stage i.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tau;

  Eigen::Index stages() const { return tau.rows(); }
  Eigen::Index candidates() const { return tau.cols(); }
};

/// Checks that stage times are strictly increasing from exactly 0 to exactly 1.
void validate_stage_times(const Eigen::VectorXd& t);

/**
 * Warp-value bounds implied by the slope box [s_min, s_max] and the
 * boundary margin beta:
 *   l_i = max(s_min t_i, 1 - s_max (1 - t_i) - beta)
 *   u_i = min(s_max t_i + beta, 1 - s_min (1 - t_i))
 * clipped to [0, 1]. With beta = 0 this pins tau_1 = 0 and tau_N = 1.
 * Throws InfeasibleError naming the stage if some l_i > u_i.
 */
Bounds compute_bounds(const Eigen::VectorXd& t, double s_min, double s_max, double beta = 0.0);

/**
 * Lay out M candidates per stage between the bounds. 0 is forced into the
 * first row and 1 into the last whenever the bounds admit them. When
 * `anchor` is given, anchor(i) replaces the nearest candidate of row i so
 * that a previous solution stays representable.
 *
 * Throws InfeasibleError if some stage has no pair of candidates whose slope
 * lies in [s_min, s_max].
 */
Grid build_grid(const Eigen::VectorXd& t, const Bounds& bounds, Eigen::Index M, double s_min,
                double s_max, const std::optional<Eigen::VectorXd>& anchor = std::nullopt);

/**
 * Shrink each stage's range by the factor eta around tau_star, clipped to
 * the initial bounds:
 *   l' = max(tau* - eta (u - l) / 2, l0),  u' = min(tau* + eta (u - l) / 2, u0).
 */
Bounds refine_bounds(const Bounds& current, const Eigen::VectorXd& tau_star, double eta,
                     const Bounds& initial);

}  // namespace timewarp
