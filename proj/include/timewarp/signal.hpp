#pragma once

/**
 * @file signal.hpp
 * @brief Vector-valued signals sampled at arbitrary times on [0, 1].
 *
 * A signal is stored as its knots (t_k, s_k). Between knots it is linearly
 * interpolated; outside the first and last knot it is extended by the
 * boundary value. Input times are rescaled affinely so the first sample sits
 * at 0 and the last at 1; the original range is kept for reporting.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace timewarp {

template <typename Scalar>
class Signal {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  /// Row k holds the value at knot k.
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Signal() = default;

  /**
   * Build a signal from raw samples.
   *
   * `times` must be strictly increasing with at least two entries and
   * `values.rows() == times.size()`. Every value must be finite. Throws
   * std::invalid_argument otherwise.
   */
  template <typename TimesDerived, typename ValuesDerived>
  static Signal from_samples(const Eigen::MatrixBase<TimesDerived>& times,
                             const Eigen::MatrixBase<ValuesDerived>& values) {
    const Eigen::Index n = times.size();
    if (n < 2) {
      throw std::invalid_argument("signal needs at least 2 samples, got " + std::to_string(n));
    }
    if (values.rows() != n) {
      throw std::invalid_argument("signal has " + std::to_string(n) + " times but " +
                                  std::to_string(values.rows()) + " value rows");
    }
    if (values.cols() < 1) {
      throw std::invalid_argument("signal dimension must be positive");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!std::isfinite(static_cast<double>(times(k)))) {
        throw std::invalid_argument("signal time " + std::to_string(k) + " is not finite");
      }
      if (k > 0 && !(times(k) > times(k - 1))) {
        throw std::invalid_argument("signal times must be strictly increasing (index " +
                                    std::to_string(k) + ")");
      }
    }
    if (!values.allFinite()) {
      throw std::invalid_argument("signal values must be finite");
    }

    Signal sig;
    const Scalar first = times(0);
    const Scalar last = times(n - 1);
    sig.span_ = {first, last};
    sig.times_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      sig.times_(k) = (times(k) - first) / (last - first);
    }
    // Pin the ends exactly; the affine map can be off by an ulp at the top.
    sig.times_(0) = Scalar(0);
    sig.times_(n - 1) = Scalar(1);
    for (Eigen::Index k = 1; k < n; ++k) {
      if (!(sig.times_(k) > sig.times_(k - 1))) {
        throw std::invalid_argument("signal times collapse after normalization");
      }
    }
    sig.values_ = values.template cast<Scalar>();
    return sig;
  }

  /// Scalar-valued convenience overload.
  template <typename TimesDerived, typename ValuesDerived>
  static Signal from_scalar_samples(const Eigen::MatrixBase<TimesDerived>& times,
                                    const Eigen::MatrixBase<ValuesDerived>& values) {
    Values v(values.size(), 1);
    v.col(0) = values;
    return from_samples(times, v);
  }

  Eigen::Index size() const { return times_.size(); }
  Eigen::Index dim() const { return values_.cols(); }
  const Vector& knot_times() const { return times_; }
  const Values& knot_values() const { return values_; }
  /// The pre-normalization time range (first, last).
  const std::pair<Scalar, Scalar>& original_span() const { return span_; }

  /**
   * Interval lookup: returns k with t_k <= t < t_{k+1}, clamped to
   * [0, size()-2]. O(log n).
   */
  Eigen::Index segment(Scalar t) const {
    const Scalar* begin = times_.data();
    const Scalar* end = begin + times_.size();
    const Eigen::Index k = std::upper_bound(begin, end, t) - begin - 1;
    return std::clamp<Eigen::Index>(k, 0, times_.size() - 2);
  }

  /**
   * Interpolated value at t as an Eigen expression (column vector). The
   * expression refers to this signal's storage.
   */
  auto operator()(Scalar t) const {
    const Eigen::Index k = segment(t);
    const Scalar t0 = times_(k);
    const Scalar t1 = times_(k + 1);
    Scalar w0;
    Scalar w1;
    if (t <= t0) {
      w0 = Scalar(1);
      w1 = Scalar(0);
    } else if (t >= t1) {
      w0 = Scalar(0);
      w1 = Scalar(1);
    } else {
      w0 = (t1 - t) / (t1 - t0);
      w1 = (t - t0) / (t1 - t0);
    }
    return (w0 * values_.row(k) + w1 * values_.row(k + 1)).transpose();
  }

  Vector eval(Scalar t) const { return (*this)(t); }

  /// Value at t for a one-dimensional signal.
  Scalar eval_scalar(Scalar t) const { return (*this)(t)(0); }

 private:
  Vector times_;
  Values values_;
  std::pair<Scalar, Scalar> span_{Scalar(0), Scalar(1)};
};

using SignalXd = Signal<double>;

}  // namespace timewarp
