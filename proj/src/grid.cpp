#include "timewarp/grid.hpp"

#include "timewarp/errors.hpp"
#include "timewarp/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace timewarp {

namespace {

// Replace the candidate nearest to v with v. Rows stay sorted because v is
// within half a spacing of the replaced point.
template <typename Row>
void insert_nearest(Row&& row, double v) {
  Eigen::Index best = 0;
  double best_dist = std::abs(row(0) - v);
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    const double d = std::abs(row(j) - v);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  row(best) = v;
}

bool stage_has_transition(const Grid& g, Eigen::Index i, double s_min, double s_max) {
  const double dt = g.t(i + 1) - g.t(i);
  const Eigen::Index m = g.candidates();
  const double* next_begin = g.tau.row(i + 1).data();
  const double* next_end = next_begin + m;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double from = g.tau(i, j);
    const double target = from + s_min * dt;
    const Eigen::Index k0 = std::lower_bound(next_begin, next_end, target) - next_begin;
    // Check neighbours with the exact slope formula the DP uses.
    for (Eigen::Index k = std::max<Eigen::Index>(k0 - 1, 0); k < std::min(k0 + 2, m); ++k) {
      const double slope = (g.tau(i + 1, k) - from) / dt;
      if (detail::in_slope_box(slope, s_min, s_max)) return true;
    }
  }
  return false;
}

}  // namespace

void validate_stage_times(const Eigen::VectorXd& t) {
  if (t.size() < 2) throw std::invalid_argument("need at least 2 stage times");
  if (t(0) != 0.0 || t(t.size() - 1) != 1.0) {
    throw std::invalid_argument("stage times must start at 0 and end at 1");
  }
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (!(t(i) > t(i - 1))) {
      throw std::invalid_argument("stage times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
  }
}

Bounds compute_bounds(const Eigen::VectorXd& t, double s_min, double s_max, double beta) {
  validate_stage_times(t);
  if (!(s_min < s_max)) throw std::invalid_argument("s_min must be less than s_max");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");

  const Eigen::Index n = t.size();
  Bounds b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = std::max(s_min * t(i), 1.0 - s_max * (1.0 - t(i)) - beta);
    const double u = std::min(s_max * t(i) + beta, 1.0 - s_min * (1.0 - t(i)));
    b.lower(i) = std::clamp(l, 0.0, 1.0);
    b.upper(i) = std::clamp(u, 0.0, 1.0);
    if (b.lower(i) > b.upper(i)) {
      throw InfeasibleError("empty warp range at stage " + std::to_string(i) + " (t=" +
                                std::to_string(t(i)) + "): lower " + std::to_string(b.lower(i)) +
                                " > upper " + std::to_string(b.upper(i)),
                            i);
    }
  }
  return b;
}

Grid build_grid(const Eigen::VectorXd& t, const Bounds& bounds, Eigen::Index M, double s_min,
                double s_max, const std::optional<Eigen::VectorXd>& anchor) {
  const Eigen::Index n = t.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n) {
    throw std::invalid_argument("bounds and stage times differ in length");
  }
  if (anchor && anchor->size() != n) {
    throw std::invalid_argument("anchor path and stage times differ in length");
  }
  if (M < 1) throw std::invalid_argument("M must be positive");

  Grid g;
  g.t = t;
  g.bounds = bounds;
  g.tau.resize(n, M);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = bounds.lower(i);
    const double u = bounds.upper(i);
    if (l > u) throw InfeasibleError("empty warp range at stage " + std::to_string(i), i);
    if (M == 1) {
      if (l != u) {
        throw std::invalid_argument("M = 1 requires lower == upper at every stage (stage " +
                                    std::to_string(i) + ")");
      }
      g.tau(i, 0) = l;
      continue;
    }
    for (Eigen::Index j = 0; j < M; ++j) {
      g.tau(i, j) = l + static_cast<double>(j) / static_cast<double>(M - 1) * (u - l);
    }
    g.tau(i, M - 1) = u;
    if (l == u) continue;
    if (anchor) insert_nearest(g.tau.row(i), std::clamp((*anchor)(i), l, u));
  }
  // With a boundary margin the refined end rows may legitimately exclude 0 or 1.
  if (M > 1) {
    if (bounds.lower(0) <= 0.0) insert_nearest(g.tau.row(0), 0.0);
    if (bounds.upper(n - 1) >= 1.0) insert_nearest(g.tau.row(n - 1), 1.0);
  }

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (!stage_has_transition(g, i, s_min, s_max)) {
      throw InfeasibleError("no candidate transition with slope in [" + std::to_string(s_min) +
                                ", " + std::to_string(s_max) + "] between stages " +
                                std::to_string(i) + " and " + std::to_string(i + 1) +
                                "; increase M or widen the slope box",
                            i);
    }
  }
  return g;
}

Bounds refine_bounds(const Bounds& current, const Eigen::VectorXd& tau_star, double eta,
                     const Bounds& initial) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  const Eigen::Index n = tau_star.size();
  if (current.lower.size() != n || initial.lower.size() != n) {
    throw std::invalid_argument("refine: length mismatch");
  }
  Bounds next{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double half = eta * (current.upper(i) - current.lower(i)) / 2.0;
    next.lower(i) = std::max(tau_star(i) - half, initial.lower(i));
    next.upper(i) = std::min(tau_star(i) + half, initial.upper(i));
  }
  return next;
}

}  // namespace timewarp
