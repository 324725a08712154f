#pragma once

/**
 * @file warp_function.hpp
 * @brief Piecewise-linear time warp tau = phi(t).
 */

#include <Eigen/Core>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace timewarp {

template <typename Scalar>
class WarpFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  WarpFunction() = default;

  /// Knots (t_i, tau_i); t strictly increasing, at least two knots.
  WarpFunction(Vector t, Vector tau) : t_(std::move(t)), tau_(std::move(tau)) {
    if (t_.size() != tau_.size()) throw std::invalid_argument("warp: t and tau differ in length");
    if (t_.size() < 2) throw std::invalid_argument("warp: need at least 2 knots");
    for (Eigen::Index i = 1; i < t_.size(); ++i) {
      if (!(t_(i) > t_(i - 1))) {
        throw std::invalid_argument("warp: knot times must be strictly increasing (index " +
                                    std::to_string(i) + ")");
      }
    }
  }

  static WarpFunction identity(const Vector& t) { return WarpFunction(t, t); }

  const Vector& t() const { return t_; }
  const Vector& tau() const { return tau_; }
  Eigen::Index size() const { return t_.size(); }

  /// phi(s) by linear interpolation, constant outside the knot range. Exact at knots.
  Scalar operator()(Scalar s) const {
    const Scalar* begin = t_.data();
    const Scalar* end = begin + t_.size();
    const Eigen::Index k =
        std::clamp<Eigen::Index>(std::upper_bound(begin, end, s) - begin - 1, 0, t_.size() - 2);
    const Scalar t0 = t_(k);
    const Scalar t1 = t_(k + 1);
    if (s <= t0) return tau_(k);
    if (s >= t1) return tau_(k + 1);
    return (t1 - s) / (t1 - t0) * tau_(k) + (s - t0) / (t1 - t0) * tau_(k + 1);
  }

  template <typename Derived>
  Vector operator()(const Eigen::MatrixBase<Derived>& s) const {
    Vector out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = (*this)(s(i));
    return out;
  }

  /// Per-interval slopes (tau_{i+1} - tau_i) / (t_{i+1} - t_i), length N-1.
  Vector slopes() const {
    const Eigen::Index n = t_.size();
    return (tau_.tail(n - 1) - tau_.head(n - 1)).cwiseQuotient(t_.tail(n - 1) - t_.head(n - 1));
  }

  /// phi(t_i) - t_i at the knots.
  Vector cumulative_warp() const { return tau_ - t_; }

  bool strictly_increasing() const {
    for (Eigen::Index i = 1; i < tau_.size(); ++i) {
      if (!(tau_(i) > tau_(i - 1))) return false;
    }
    return true;
  }

  /// Same function sampled at new knot times.
  WarpFunction resample(const Vector& t) const { return WarpFunction(t, (*this)(t)); }

 private:
  Vector t_;
  Vector tau_;
};

using WarpFunctionXd = WarpFunction<double>;

/// Exact inverse of a strictly increasing piecewise-linear warp.
template <typename Scalar>
WarpFunction<Scalar> inverse(const WarpFunction<Scalar>& phi) {
  if (!phi.strictly_increasing()) {
    throw std::invalid_argument("warp is not strictly increasing, cannot invert");
  }
  return WarpFunction<Scalar>(phi.tau(), phi.t());
}

}  // namespace timewarp
