#pragma once

#include "timewarp/signal.hpp"
#include "timewarp/warp_function.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace tw_test {

using timewarp::SignalXd;

inline SignalXd sample(const std::function<double(double)>& f, int n) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = f(t(i));
  return SignalXd::from_scalar_samples(t, v);
}

inline double smooth(double t) {
  return std::sin(2.0 * std::numbers::pi * t) + 0.5 * std::exp(-std::pow((t - 0.6) / 0.1, 2));
}

inline double phi_true(double t) { return t + 0.1 * std::sin(std::numbers::pi * t); }

inline SignalXd random_signal(std::mt19937_64& rng, int n, int dim = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.2, 1.0);
  Eigen::VectorXd t(n);
  Eigen::MatrixXd v(n, dim);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += gap(rng);
    t(i) = acc;
    for (int d = 0; d < dim; ++d) v(i, d) = u(rng);
  }
  return SignalXd::from_samples(t, v);
}

/// Random strictly increasing warp with fixed ends on `knots` uniform knots.
inline timewarp::WarpFunctionXd random_warp(std::mt19937_64& rng, int knots) {
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  Eigen::VectorXd tau(knots);
  tau(0) = 0.0;
  for (int i = 1; i < knots; ++i) tau(i) = tau(i - 1) + gap(rng);
  tau /= tau(knots - 1);
  tau(knots - 1) = 1.0;
  return timewarp::WarpFunctionXd(Eigen::VectorXd::LinSpaced(knots, 0.0, 1.0), tau);
}

}  // namespace tw_test
