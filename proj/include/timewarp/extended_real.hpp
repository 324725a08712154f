#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>

namespace timewarp {

/**
 * A real number or +infinity. Penalties use +infinity to encode hard
 * constraints, so sums saturate and a zero weight does not erase an
 * infinite penalty.
 */
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;

  /// Accepts any finite value or +inf; NaN and -inf throw std::domain_error.
  ExtendedReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw std::domain_error("extended real must be finite or +inf");
    }
  }

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.v_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  constexpr bool is_infinite() const { return !is_finite(); }

  /// The underlying double; +inf when infinite.
  constexpr double value() const { return v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtendedReal(a.v_ + b.v_);
  }

  ExtendedReal& operator+=(ExtendedReal other) { return *this = *this + other; }

  /// Scale by a nonnegative weight. inf * 0 stays inf.
  friend ExtendedReal operator*(double w, ExtendedReal a) {
    if (a.is_infinite()) return infinity();
    return ExtendedReal(w * a.v_);
  }

  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

/// Saturating addition on the raw representation used in DP tables.
inline double saturating_add(double a, double b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return (a == inf || b == inf) ? inf : a + b;
}

}  // namespace timewarp
