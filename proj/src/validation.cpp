#include "timewarp/validation.hpp"

#include "timewarp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace timewarp {

namespace {

Eigen::VectorXd with_endpoints(std::vector<double> interior) {
  std::sort(interior.begin(), interior.end());
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior.size()) + 2);
  out(0) = 0.0;
  for (size_t k = 0; k < interior.size(); ++k) out(static_cast<Eigen::Index>(k) + 1) = interior[k];
  out(out.size() - 1) = 1.0;
  return out;
}

std::pair<Eigen::Index, Eigen::Index> argmin_cell(const Eigen::MatrixXd& m) {
  std::pair<Eigen::Index, Eigen::Index> best{0, 0};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) < m(best.first, best.second)) best = {i, j};
    }
  }
  return best;
}

}  // namespace

TimeSplit split_times(const Eigen::VectorXd& t, double test_fraction, std::uint64_t seed) {
  if (t.size() < 4) throw std::invalid_argument("split needs at least 4 time points");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  validate_stage_times(t);
  const Eigen::Index interior = t.size() - 2;
  const auto n_test = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(test_fraction * static_cast<double>(interior))), 1,
      interior - 1);

  // Fisher-Yates with a fixed engine so splits are reproducible everywhere;
  // std::shuffle's output is implementation-defined.
  std::vector<Eigen::Index> order(static_cast<size_t>(interior));
  std::iota(order.begin(), order.end(), Eigen::Index{1});
  std::mt19937_64 rng(seed);
  for (size_t k = order.size() - 1; k > 0; --k) {
    const size_t r = static_cast<size_t>(rng() % (k + 1));
    std::swap(order[k], order[r]);
  }

  std::vector<double> test;
  std::vector<double> train;
  for (size_t k = 0; k < order.size(); ++k) {
    (static_cast<Eigen::Index>(k) < n_test ? test : train).push_back(t(order[k]));
  }
  return {with_endpoints(std::move(train)), with_endpoints(std::move(test)), seed};
}

double split_loss(const LossSpec& loss, const SignalXd& x, const SignalXd& y,
                  const WarpFunctionXd& phi, const Eigen::VectorXd& s) {
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < s.size(); ++k) {
    const double tau = phi(s(k));
    total += (s(k + 1) - s(k)) * loss_value(loss, x(tau), y(s(k)), tau, s(k));
  }
  return total;
}

TrainTestLosses train_test_losses(const SignalXd& x, const SignalXd& y,
                                  const PenaltySpec& penalties, const SolveParams& params,
                                  const TimeSplit& split) {
  SolveParams train_params = params;
  train_params.stage_times = split.train;
  TrainTestLosses out;
  out.fit = solve(x, y, penalties, train_params);
  out.train = split_loss(penalties.loss, x, y, out.fit.warp, split.train);
  out.test = split_loss(penalties.loss, x, y, out.fit.warp, split.test);
  return out;
}

WarpErrors warp_errors(const LossSpec& loss, const WarpFunctionXd& phi,
                       const WarpFunctionXd& phi_true, const TimeSplit& split) {
  auto score = [&](const Eigen::VectorXd& s) {
    double total = 0.0;
    Eigen::VectorXd diff(1);
    for (Eigen::Index k = 0; k + 1 < s.size(); ++k) {
      diff(0) = phi_true(s(k)) - phi(s(k));
      total += (s(k + 1) - s(k)) * loss_value(loss, diff);
    }
    return total;
  };
  return {score(split.train), score(split.test)};
}

ValidationReport grid_search(const SignalXd& x, const SignalXd& y, const PenaltySpec& penalties,
                             const SolveParams& params, const std::vector<double>& lambda_cum,
                             const std::vector<double>& lambda_inst, const TimeSplit& split,
                             const std::optional<WarpFunctionXd>& phi_true) {
  if (lambda_cum.empty() || lambda_inst.empty()) {
    throw std::invalid_argument("grid search needs nonempty lambda lists");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto rows = static_cast<Eigen::Index>(lambda_cum.size());
  const auto cols = static_cast<Eigen::Index>(lambda_inst.size());

  ValidationReport report;
  report.lambda_cum = lambda_cum;
  report.lambda_inst = lambda_inst;
  report.train_loss = Eigen::MatrixXd::Constant(rows, cols, inf);
  report.test_loss = Eigen::MatrixXd::Constant(rows, cols, inf);
  if (phi_true) {
    report.warp_error_train = Eigen::MatrixXd::Constant(rows, cols, inf);
    report.warp_error_test = Eigen::MatrixXd::Constant(rows, cols, inf);
  }

  detail::parallel_for(static_cast<size_t>(rows * cols), [&](size_t cell) {
    const auto i = static_cast<Eigen::Index>(cell) / cols;
    const auto j = static_cast<Eigen::Index>(cell) % cols;
    PenaltySpec pen = penalties;
    pen.lambda_cum = lambda_cum[static_cast<size_t>(i)];
    pen.lambda_inst = lambda_inst[static_cast<size_t>(j)];
    try {
      const TrainTestLosses r = train_test_losses(x, y, pen, params, split);
      report.train_loss(i, j) = r.train;
      report.test_loss(i, j) = r.test;
      if (phi_true) {
        const WarpErrors e = warp_errors(pen.loss, r.fit.warp, *phi_true, split);
        (*report.warp_error_train)(i, j) = e.train;
        (*report.warp_error_test)(i, j) = e.test;
      }
    } catch (const std::exception&) {
      // Cell stays at +inf.
    }
  });

  report.best_test_loss = argmin_cell(report.test_loss);
  if (phi_true) report.best_warp_error = argmin_cell(*report.warp_error_test);
  return report;
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw std::invalid_argument("log_space: bad range");
  std::vector<double> out(static_cast<size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < n; ++k) out[static_cast<size_t>(k)] = std::pow(10.0, a + (b - a) * k / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace timewarp
