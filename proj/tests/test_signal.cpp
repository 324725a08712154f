#include "catch_amalgamated.hpp"

#include "support.hpp"
#include "timewarp/signal.hpp"
#include "timewarp/warp_function.hpp"

#include <random>

using timewarp::SignalXd;
using timewarp::WarpFunctionXd;

TEST_CASE("from_samples keeps normalized input", "[signal]") {
  const auto s = SignalXd::from_scalar_samples(Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1));
  CHECK(s.knot_times() == Eigen::Vector2d(0, 1));
  CHECK(s.original_span() == std::pair<double, double>(0, 1));
  CHECK(s.dim() == 1);
}

TEST_CASE("from_samples rescales times affinely", "[signal]") {
  const auto s = SignalXd::from_scalar_samples(Eigen::Vector3d(10, 20, 30), Eigen::Vector3d(1, 2, 3));
  CHECK(s.knot_times() == Eigen::Vector3d(0, 0.5, 1));
  CHECK(s.original_span() == std::pair<double, double>(10, 30));
  CHECK(s.eval_scalar(0.5) == 2.0);
}

TEST_CASE("from_samples rejects bad input", "[signal]") {
  using V = Eigen::VectorXd;
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(V::Constant(1, 0.0), V::Constant(1, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(Eigen::Vector3d(0, 1, 2), Eigen::Vector2d(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(Eigen::Vector2d(0, 1),
                                                Eigen::Vector2d(1, std::nan(""))),
                  std::invalid_argument);
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(
                      Eigen::Vector2d(0, std::numeric_limits<double>::infinity()),
                      Eigen::Vector2d(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SignalXd::from_scalar_samples(Eigen::Vector3d(0, 2, 1), Eigen::Vector3d(1, 2, 3)),
                  std::invalid_argument);
}

TEST_CASE("eval interpolates and extends", "[signal]") {
  const auto s = SignalXd::from_scalar_samples(Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 10));
  CHECK(s.eval_scalar(0.3) == Catch::Approx(3.0).epsilon(1e-15));
  CHECK(s.eval_scalar(-0.5) == 0.0);
  CHECK(s.eval_scalar(1.5) == 10.0);
  CHECK(s.eval_scalar(1.0) == 10.0);
}

TEST_CASE("vector-valued evaluation", "[signal]") {
  Eigen::MatrixXd v(3, 2);
  v << 0, 1, 2, 3, 4, 5;
  const auto s = SignalXd::from_samples(Eigen::Vector3d(0, 0.5, 1), v);
  CHECK(s.dim() == 2);
  const Eigen::VectorXd mid = s(0.25);
  CHECK(mid(0) == Catch::Approx(1.0));
  CHECK(mid(1) == Catch::Approx(2.0));
}

TEST_CASE("eval is exact at knots and bounded between them", "[signal][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = tw_test::random_signal(rng, 2 + trial % 20, 1 + trial % 3);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      CHECK((s(s.knot_times()(k)) - s.knot_values().row(k).transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(s(-1.0) == s(0.0));
    CHECK(s(2.0) == s(1.0));
    for (int q = 0; q < 50; ++q) {
      const double t = u(rng);
      const auto k = s.segment(t);
      const Eigen::VectorXd a = s.knot_values().row(k).transpose();
      const Eigen::VectorXd b = s.knot_values().row(k + 1).transpose();
      const Eigen::VectorXd v = s(t);
      CHECK(((v.array() >= a.cwiseMin(b).array() - 1e-12) &&
             (v.array() <= a.cwiseMax(b).array() + 1e-12)).all());
    }
  }
}

TEST_CASE("eval is continuous across knots", "[signal][property]") {
  std::mt19937_64 rng(11);
  const auto s = tw_test::random_signal(rng, 30);
  for (Eigen::Index k = 1; k + 1 < s.size(); ++k) {
    const double t = s.knot_times()(k);
    CHECK(std::abs(s.eval_scalar(t - 1e-12) - s.eval_scalar(t)) < 1e-9);
    CHECK(std::abs(s.eval_scalar(t + 1e-12) - s.eval_scalar(t)) < 1e-9);
  }
}

TEST_CASE("warp function evaluation and inverse", "[signal][warp]") {
  const WarpFunctionXd phi(Eigen::Vector3d(0, 0.5, 1), Eigen::Vector3d(0, 0.25, 1));
  CHECK(phi(0.25) == 0.125);
  CHECK(phi(0.75) == 0.625);
  CHECK(phi.slopes() == Eigen::Vector2d(0.5, 1.5));
  const auto inv = timewarp::inverse(phi);
  for (double s : {0.0, 0.1, 0.3, 0.7, 1.0}) CHECK(phi(inv(s)) == Catch::Approx(s).margin(1e-15));
  const WarpFunctionXd flat(Eigen::Vector3d(0, 0.5, 1), Eigen::Vector3d(0, 0, 1));
  CHECK_THROWS_AS(timewarp::inverse(flat), std::invalid_argument);
  CHECK_THROWS_AS(WarpFunctionXd(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1)), std::invalid_argument);
}

TEST_CASE("single precision signals", "[signal]") {
  using SignalXf = timewarp::Signal<float>;
  const auto s = SignalXf::from_scalar_samples(Eigen::Vector2f(0, 2), Eigen::Vector2f(0, 4));
  CHECK(s.eval_scalar(0.5f) == 2.0f);
}
