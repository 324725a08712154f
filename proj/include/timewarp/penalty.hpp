#pragma once

/**
 * @file penalty.hpp
 * @brief Loss and regularization penalties evaluated pointwise.
 *
 * The loss L compares the warped signal with the target. The cumulative
 * regularizer acts on phi(t) - t and the instantaneous regularizer on
 * phi'(t) - 1, with a hard box [slope_min, slope_max] on phi'(t) itself.
 * Regularizers return ExtendedReal so constraints can be written as +inf.
 */

#include "timewarp/extended_real.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace timewarp {

enum class LossKind { squared_l2, l1, huber, band, custom };
enum class BandNorm { l2, linf };
enum class RegularizerKind { square, abs, zero, custom };

/// Custom loss hook. Receives x(tau), y(t), tau and t so both signal-difference
/// and categorical time-based losses can be expressed.
using CustomLoss = std::function<double(const Eigen::Ref<const Eigen::VectorXd>& x_value,
                                        const Eigen::Ref<const Eigen::VectorXd>& y_value,
                                        double tau, double t)>;
/// Custom regularizer hook; may return +inf to encode a constraint.
using CustomRegularizer = std::function<double(double)>;

struct LossSpec {
  LossKind kind = LossKind::squared_l2;
  double huber_m = 1.0;
  double band_eps = 0.1;
  BandNorm band_norm = BandNorm::l2;
  std::string custom_name;
  CustomLoss custom;

  static LossSpec squared_l2() { return {}; }
  static LossSpec l1() {
    LossSpec s;
    s.kind = LossKind::l1;
    return s;
  }
  static LossSpec huber(double m) {
    LossSpec s;
    s.kind = LossKind::huber;
    s.huber_m = m;
    return s;
  }
  static LossSpec band(double eps, BandNorm norm = BandNorm::l2) {
    LossSpec s;
    s.kind = LossKind::band;
    s.band_eps = eps;
    s.band_norm = norm;
    return s;
  }
  static LossSpec custom_loss(std::string name, CustomLoss fn) {
    LossSpec s;
    s.kind = LossKind::custom;
    s.custom_name = std::move(name);
    s.custom = std::move(fn);
    return s;
  }

  /// Throws std::invalid_argument on non-positive parameters or a missing hook.
  void validate() const;
};

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::square;
  /// Hard box on the raw argument (the slope, for the instantaneous term).
  double slope_min = -std::numeric_limits<double>::infinity();
  double slope_max = std::numeric_limits<double>::infinity();
  std::string custom_name;
  CustomRegularizer custom;

  static RegularizerSpec square() { return {}; }
  static RegularizerSpec abs() {
    RegularizerSpec s;
    s.kind = RegularizerKind::abs;
    return s;
  }
  static RegularizerSpec zero() {
    RegularizerSpec s;
    s.kind = RegularizerKind::zero;
    return s;
  }
  static RegularizerSpec custom_regularizer(std::string name, CustomRegularizer fn) {
    RegularizerSpec s;
    s.kind = RegularizerKind::custom;
    s.custom_name = std::move(name);
    s.custom = std::move(fn);
    return s;
  }
  RegularizerSpec with_box(double lo, double hi) const {
    RegularizerSpec s = *this;
    s.slope_min = lo;
    s.slope_max = hi;
    return s;
  }

  void validate() const;
};

struct PenaltySpec {
  LossSpec loss;
  RegularizerSpec reg_cum;
  double lambda_cum = 0.01;
  RegularizerSpec reg_inst = RegularizerSpec::square().with_box(0.001, 10.0);
  double lambda_inst = 0.1;
  /// Second-derivative term; only used by the second-order solver.
  std::optional<RegularizerSpec> reg_inst2;
  double lambda_inst2 = 0.0;

  static PenaltySpec defaults() { return {}; }

  double slope_min() const { return reg_inst.slope_min; }
  double slope_max() const { return reg_inst.slope_max; }

  /// Checks weights, loss parameters and that slope_min < slope_max.
  void validate() const;
};

namespace detail {

inline ExtendedReal apply_regularizer(const RegularizerSpec& spec, double u) {
  switch (spec.kind) {
    case RegularizerKind::square:
      return ExtendedReal(u * u);
    case RegularizerKind::abs:
      return ExtendedReal(std::abs(u));
    case RegularizerKind::zero:
      return ExtendedReal(0.0);
    case RegularizerKind::custom:
      return ExtendedReal(spec.custom(u));
  }
  return ExtendedReal::infinity();
}

}  // namespace detail

/// Loss on a difference vector u = x(tau) - y(t). Custom losses see x = u, y = 0.
template <typename Derived>
double loss_value(const LossSpec& spec, const Eigen::MatrixBase<Derived>& u) {
  switch (spec.kind) {
    case LossKind::squared_l2:
      return u.squaredNorm();
    case LossKind::l1:
      return u.template lpNorm<1>();
    case LossKind::huber: {
      const double sq = u.squaredNorm();
      const double m = spec.huber_m;
      return sq <= m * m ? sq : 2.0 * m * std::sqrt(sq) - m * m;
    }
    case LossKind::band: {
      const double n = spec.band_norm == BandNorm::l2 ? u.norm() : u.template lpNorm<Eigen::Infinity>();
      return n <= spec.band_eps ? 0.0 : 1.0;
    }
    case LossKind::custom: {
      const Eigen::VectorXd x = u;
      return spec.custom(x, Eigen::VectorXd::Zero(x.size()), 0.0, 0.0);
    }
  }
  return 0.0;
}

/// Loss in the general form used by the solver: L(x(tau), y(t), tau, t).
template <typename XDerived, typename YDerived>
double loss_value(const LossSpec& spec, const Eigen::MatrixBase<XDerived>& x_value,
                  const Eigen::MatrixBase<YDerived>& y_value, double tau, double t) {
  if (spec.kind == LossKind::custom) {
    return spec.custom(x_value, y_value, tau, t);
  }
  return loss_value(spec, x_value - y_value);
}

/// R^cum applied to the cumulative warp w = phi(t) - t.
inline ExtendedReal reg_cum_value(const RegularizerSpec& spec, double w) {
  if (w < spec.slope_min || w > spec.slope_max) return ExtendedReal::infinity();
  return detail::apply_regularizer(spec, w);
}

namespace detail {
/// Slopes are differences of rounded grid values, so a slope that sits on a
/// bound in exact arithmetic can land a few ulps outside it.
constexpr double box_slack = 1e-9;

inline bool in_slope_box(double slope, double lo, double hi) {
  return slope >= lo - box_slack * std::max(1.0, std::abs(lo)) &&
         slope <= hi + box_slack * std::max(1.0, std::abs(hi));
}
}  // namespace detail

/// R^inst at a raw slope phi'(t): +inf outside the box, else kind(slope - 1).
inline ExtendedReal reg_inst_value(const RegularizerSpec& spec, double slope) {
  if (!detail::in_slope_box(slope, spec.slope_min, spec.slope_max)) return ExtendedReal::infinity();
  return detail::apply_regularizer(spec, slope - 1.0);
}

/// R^inst2 at a second derivative phi''(t); the box applies to the raw value.
inline ExtendedReal reg_inst2_value(const RegularizerSpec& spec, double curvature) {
  if (!(curvature >= spec.slope_min && curvature <= spec.slope_max)) return ExtendedReal::infinity();
  return detail::apply_regularizer(spec, curvature);
}

// Named hooks usable from configuration files ("custom:<name>").
void register_custom_loss(const std::string& name, CustomLoss fn);
void register_custom_regularizer(const std::string& name, CustomRegularizer fn);
/// Throws std::invalid_argument if the name is unknown.
CustomLoss find_custom_loss(const std::string& name);
CustomRegularizer find_custom_regularizer(const std::string& name);

}  // namespace timewarp
