#include "catch_amalgamated.hpp"

#include "timewarp/extended_real.hpp"
#include "timewarp/penalty.hpp"

#include <limits>
#include <random>

using namespace timewarp;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

double loss(const LossSpec& s, std::initializer_list<double> u) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(u.size()));
  Eigen::Index k = 0;
  for (double x : u) v(k++) = x;
  return loss_value(s, v);
}
}  // namespace

TEST_CASE("loss values", "[penalty]") {
  CHECK(loss(LossSpec::squared_l2(), {3, 4}) == 25.0);
  CHECK(loss(LossSpec::l1(), {3, -4}) == 7.0);
  CHECK(loss(LossSpec::huber(1.0), {2.0}) == 3.0);
  CHECK(loss(LossSpec::huber(1.0), {0.0, 2.0}) == 3.0);
  CHECK(loss(LossSpec::band(0.1), {0.05}) == 0.0);
  CHECK(loss(LossSpec::band(0.1), {0.2}) == 1.0);
  CHECK(loss(LossSpec::band(0.1, BandNorm::linf), {0.08, 0.08}) == 0.0);
  CHECK(loss(LossSpec::band(0.1, BandNorm::l2), {0.08, 0.08}) == 1.0);
}

TEST_CASE("huber matches square inside and is continuous at M", "[penalty][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> m_dist(0.1, 3.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double m = m_dist(rng);
    const auto h = LossSpec::huber(m);
    Eigen::Vector3d v(u(rng), u(rng), u(rng));
    v *= 0.99 * m / v.norm();
    CHECK(loss_value(h, v) == loss_value(LossSpec::squared_l2(), v));
    v *= m / v.norm();
    const double at = loss_value(h, v);
    CHECK(loss_value(h, Eigen::Vector3d(v * (1 + 1e-9))) == Catch::Approx(at).epsilon(1e-7));
    CHECK(at == Catch::Approx(m * m).epsilon(1e-12));
  }
}

TEST_CASE("built-in penalties are nonnegative and vanish at the origin", "[penalty][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const LossSpec losses[] = {LossSpec::squared_l2(), LossSpec::l1(), LossSpec::huber(0.7),
                             LossSpec::band(0.3)};
  const RegularizerSpec regs[] = {RegularizerSpec::square(), RegularizerSpec::abs(),
                                  RegularizerSpec::zero()};
  for (const auto& l : losses) CHECK(loss_value(l, Eigen::Vector2d::Zero()) == 0.0);
  for (const auto& r : regs) {
    CHECK(reg_cum_value(r, 0.0) == ExtendedReal(0.0));
    CHECK(reg_inst_value(r, 1.0) == ExtendedReal(0.0));
  }
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Vector2d v(u(rng), u(rng));
    for (const auto& l : losses) CHECK(loss_value(l, v) >= 0.0);
    for (const auto& r : regs) CHECK(reg_cum_value(r, v(0)).value() >= 0.0);
  }
}

TEST_CASE("cumulative regularizer values", "[penalty]") {
  CHECK(reg_cum_value(RegularizerSpec::square(), 0.2).value() == Catch::Approx(0.04).epsilon(1e-15));
  CHECK(reg_cum_value(RegularizerSpec::abs(), -0.3).value() == 0.3);
  CHECK(reg_cum_value(RegularizerSpec::zero(), 0.9).value() == 0.0);
  const auto constrained = RegularizerSpec::square().with_box(-0.1, 0.1);
  CHECK(reg_cum_value(constrained, 0.2).is_infinite());
}

TEST_CASE("instantaneous regularizer box", "[penalty]") {
  const auto r = RegularizerSpec::square().with_box(0.1, 2.0);
  CHECK(reg_inst_value(r, 1.0).value() == 0.0);
  CHECK(reg_inst_value(r, 3.0).is_infinite());
  CHECK(reg_inst_value(r, 1.5).value() == 0.25);
  CHECK(reg_inst_value(r, 0.05).is_infinite());
  CHECK(reg_inst_value(r, -1.0).is_infinite());
}

TEST_CASE("box is infinite exactly outside", "[penalty][property]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  const auto r = RegularizerSpec::abs().with_box(0.2, 1.7);
  for (int trial = 0; trial < 1000; ++trial) {
    const double s = u(rng);
    const bool inside = s >= 0.2 && s <= 1.7;
    CHECK(reg_inst_value(r, s).is_finite() == inside);
  }
}

TEST_CASE("extended reals saturate", "[penalty]") {
  const auto big = ExtendedReal::infinity();
  CHECK((big + ExtendedReal(1.0)).is_infinite());
  CHECK((0.0 * big).is_infinite());
  CHECK((2.0 * ExtendedReal(1.5)).value() == 3.0);
  CHECK(ExtendedReal(1.0) < big);
  CHECK_THROWS_AS(ExtendedReal(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(ExtendedReal(-inf), std::domain_error);
  CHECK(saturating_add(inf, 1.0) == inf);
  CHECK(saturating_add(1.0, 2.0) == 3.0);
}

TEST_CASE("penalty validation", "[penalty]") {
  CHECK_NOTHROW(PenaltySpec::defaults().validate());
  auto p = PenaltySpec::defaults();
  CHECK(p.slope_min() == 0.001);
  CHECK(p.slope_max() == 10.0);
  p.reg_inst = p.reg_inst.with_box(2.0, 1.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PenaltySpec::defaults();
  p.lambda_cum = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PenaltySpec::defaults();
  p.loss = LossSpec::huber(0.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.loss = LossSpec::band(-1.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("custom hooks", "[penalty]") {
  register_custom_loss("abs_time", [](const auto&, const auto&, double tau, double t) {
    return std::abs(tau - t);
  });
  register_custom_regularizer("hinge", [](double w) { return w > 0.5 ? inf : 0.0; });
  const auto l = LossSpec::custom_loss("abs_time", find_custom_loss("abs_time"));
  CHECK(loss_value(l, Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4), 0.7, 0.2) ==
        Catch::Approx(0.5));
  const auto r = RegularizerSpec::custom_regularizer("hinge", find_custom_regularizer("hinge"));
  CHECK(reg_cum_value(r, 0.6).is_infinite());
  CHECK(reg_cum_value(r, 0.4).value() == 0.0);
  CHECK_THROWS_AS(find_custom_loss("missing"), std::invalid_argument);
  CHECK_THROWS_AS(find_custom_regularizer("missing"), std::invalid_argument);
}
