#include "support.hpp"
#include "timewarp/alignment.hpp"
#include "timewarp/dp.hpp"
#include "timewarp/solver.hpp"
#include "timewarp/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace timewarp;
using tw_test::sample;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_identity_gap(const WarpFunctionXd& w) { return (w.tau() - w.t()).cwiseAbs().maxCoeff(); }

SignalXd warped_copy(const std::function<double(double)>& f, int n) {
  return sample([&](double t) { return f(tw_test::phi_true(t)); }, n);
}

// Path cost summed term by term from the discretized objective.
double path_objective(const SignalXd& x, const SignalXd& y, const PenaltySpec& pen,
                      const Eigen::VectorXd& t, const Eigen::VectorXd& tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    const double dt = t(i + 1) - t(i);
    const double slope = (tau(i + 1) - tau(i)) / dt;
    if (!detail::in_slope_box(slope, pen.slope_min(), pen.slope_max())) return inf;
    const double w = tau(i) - t(i);
    total += dt * (x(tau(i)) - y(t(i))).squaredNorm();
    total += dt * pen.lambda_cum * w * w;
    total += dt * pen.lambda_inst * (slope - 1.0) * (slope - 1.0);
  }
  return total;
}

double enumerate_paths(const SignalXd& x, const SignalXd& y, const PenaltySpec& pen,
                       const Grid& g) {
  const Eigen::Index n = g.stages();
  const Eigen::Index m = g.candidates();
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
  Eigen::VectorXd tau(n);
  double best = inf;
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) tau(i) = g.tau(i, idx(i));
    best = std::min(best, path_objective(x, y, pen, g.t, tau));
    Eigen::Index i = 0;
    while (i < n && ++idx(i) == m) idx(i++) = 0;
    if (i == n) break;
  }
  return best;
}

struct Instance {
  SignalXd x, y;
  PenaltySpec pen;
  Grid grid;
};

Instance random_instance(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  std::uniform_real_distribution<double> lo(0.0, 0.6);
  std::uniform_real_distribution<double> hi(1.5, 4.0);
  std::uniform_real_distribution<double> gap(0.3, 1.0);
  std::uniform_int_distribution<int> dim(1, 3);
  const int d = dim(rng);
  Instance inst{tw_test::random_signal(rng, 3 + n, d), tw_test::random_signal(rng, 2 + n, d),
                PenaltySpec::defaults(), {}};
  inst.pen.lambda_cum = lam(rng);
  inst.pen.lambda_inst = lam(rng);
  inst.pen.reg_inst = RegularizerSpec::square().with_box(lo(rng), hi(rng));
  Eigen::VectorXd t(n);
  t(0) = 0.0;
  for (int i = 1; i < n; ++i) t(i) = t(i - 1) + gap(rng);
  t /= t(n - 1);
  t(n - 1) = 1.0;
  const auto b = compute_bounds(t, inst.pen.slope_min(), inst.pen.slope_max());
  inst.grid = build_grid(t, b, m, inst.pen.slope_min(), inst.pen.slope_max());
  return inst;
}

Outcome dp_vs_enumeration() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  const int ns[] = {4, 5, 6};
  const int ms[] = {2, 3, 4};
  int compared = 0, infeasible = 0, bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Instance inst = random_instance(rng, ns[k % 3], ms[(k / 3) % 3]);
    const WarpProblem p{inst.x, inst.y, inst.pen};
    const double oracle = enumerate_paths(inst.x, inst.y, inst.pen, inst.grid);
    if (oracle == inf) {
      try {
        shortest_path(p, inst.grid);
        ++bad;
      } catch (const InfeasibleError&) {
        ++infeasible;
      }
      continue;
    }
    const double got = shortest_path(p, inst.grid).objective;
    const double err = std::abs(got - oracle) / std::max(1.0, std::abs(oracle));
    worst = std::max(worst, err);
    if (err > 1e-12) ++bad;
    ++compared;
  }
  const double elapsed = seconds_since(start);
  return {bad == 0 && elapsed < 5.0,
          fmt("%.0f compared, worst rel err %.2e, %.2f s", compared, worst, elapsed) +
              (infeasible ? ", " + std::to_string(infeasible) + " infeasible agreed" : "")};
}

Outcome identity_recovery() {
  const auto x = sample(tw_test::smooth, 200);
  const auto r = solve(x, x, PenaltySpec::defaults());
  const double gap = max_identity_gap(r.warp);
  return {gap <= 0.01 && r.objective <= 1e-4,
          fmt("max |phi-t| %.2e, objective %.2e", gap, r.objective)};
}

Outcome ground_truth_recovery() {
  const auto x = sample(tw_test::smooth, 200);
  const auto y = warped_copy(tw_test::smooth, 200);
  std::vector<double> lambdas{0.0};
  for (double v : log_space(1e-3, 1.0, 6)) lambdas.push_back(v);
  const auto split = split_times(stage_times_for(y, {}), 0.5, 7);
  const WarpFunctionXd truth(
      Eigen::VectorXd::LinSpaced(1001, 0.0, 1.0),
      Eigen::VectorXd::LinSpaced(1001, 0.0, 1.0).unaryExpr(&tw_test::phi_true));
  const auto rep = grid_search(x, y, PenaltySpec::defaults(), {}, lambdas, lambdas, split, truth);
  const auto [bi, bj] = rep.best_test_loss;
  const double best = (*rep.warp_error_test)(bi, bj);
  const double corner = (*rep.warp_error_test)(0, 0);
  return {best <= 0.02 && best <= corner,
          fmt("best cell eps_test %.3e, unregularized corner %.3e", best, corner)};
}

Outcome refinement_monotone() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  std::uniform_int_distribution<int> len(20, 80);
  std::uniform_int_distribution<int> cand(10, 40);
  int bad = 0, solved = 0;
  for (int k = 0; k < 50; ++k) {
    const auto x = tw_test::random_signal(rng, len(rng));
    const auto y = tw_test::random_signal(rng, len(rng));
    PenaltySpec pen;
    pen.lambda_cum = lam(rng);
    pen.lambda_inst = lam(rng);
    SolveParams params;
    params.M = cand(rng);
    params.refinements = 5;
    params.min_relative_improvement = 0.0;
    const auto r = solve(x, y, pen, params);
    for (size_t q = 1; q < r.history.size(); ++q) {
      if (r.history[q] > r.history[q - 1] + 1e-12) ++bad;
    }
    ++solved;
  }
  return {bad == 0, fmt("%.0f problems, %.0f increases", solved, bad)};
}

Outcome performance() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> noise(0.0, 0.05);
  const auto x = sample([&](double t) { return tw_test::smooth(t) + noise(rng); }, 1000);
  const auto y = sample([&](double t) { return tw_test::smooth(tw_test::phi_true(t)) + noise(rng); },
                        1000);
  SolveParams params;
  params.N = 1000;
  params.M = 100;
  params.refinements = 3;
  solve(x, y, PenaltySpec::defaults(), params);
  double worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    solve(x, y, PenaltySpec::defaults(), params);
    worst = std::max(worst, seconds_since(start));
  }
  return {worst <= 2.0, fmt("slowest of 3 runs %.3f s", worst)};
}

Outcome centering() {
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<int> knots(3, 30);
  double worst = 0.0;
  for (int size : {2, 5, 10}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<WarpFunctionXd> family;
      for (int i = 0; i < size; ++i) family.push_back(tw_test::random_warp(rng, knots(rng)));
      const auto c = recenter(family);
      for (int k = 0; k < 1000; ++k) {
        const double s = static_cast<double>(k) / 999.0;
        double m = 0.0;
        for (const auto& w : c) m += w(s);
        worst = std::max(worst, std::abs(m / size - s));
      }
    }
  }
  return {worst <= 1e-9, fmt("worst mean deviation %.2e", worst)};
}

Outcome alignment_monotone() {
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> shift(-0.02, 0.02);
  std::uniform_real_distribution<double> amp(0.9, 1.1);
  std::vector<SignalXd> group;
  for (int i = 0; i < 10; ++i) {
    const double c = 0.5 + shift(rng);
    const double a = amp(rng);
    group.push_back(sample([&](double t) { return a * std::exp(-std::pow((t - c) / 0.08, 2)); }, 100));
  }
  SolveParams params;
  params.M = 40;
  params.N = 80;
  const auto r = align(group, PenaltySpec::defaults(), params, 5);
  bool monotone = true;
  for (size_t q = 1; q < r.history.size(); ++q) monotone &= r.history[q] <= r.history[q - 1] + 1e-12;
  const double first = max_pairwise_inconsistency(r.warps_per_round.front());
  const double last = max_pairwise_inconsistency(r.warps);
  return {monotone && last <= 0.05 && last <= first,
          fmt("%.0f rounds, inconsistency round 1 %.4f, final %.4f",
              static_cast<double>(r.history.size()), first, last)};
}

Outcome lasso() {
  const auto x = sample(tw_test::smooth, 150);
  const auto y = warped_copy(tw_test::smooth, 150);
  PenaltySpec pen;
  pen.reg_inst = RegularizerSpec::abs().with_box(0.001, 10.0);
  auto flat_fraction = [&](double lam) {
    pen.lambda_inst = lam;
    const Eigen::VectorXd s = solve(x, y, pen).warp.slopes();
    return static_cast<double>(((s.array() - 1.0).abs() <= 1e-3).count()) /
           static_cast<double>(s.size());
  };
  const double strong = flat_fraction(1.0);
  const double weak = flat_fraction(0.01);
  return {strong >= weak, fmt("flat fraction %.3f at 1.0, %.3f at 0.01", strong, weak)};
}

Outcome symmetric() {
  const auto x = sample(tw_test::smooth, 150);
  const auto y = warped_copy(tw_test::smooth, 150);
  const auto pen = PenaltySpec::defaults();
  const auto r = solve_symmetric(x, y, pen);
  bool exact = true;
  for (Eigen::Index i = 0; i < r.phi.size(); ++i) {
    exact &= r.phi.tau()(i) + r.psi.tau()(i) == 2.0 * r.phi.t()(i);
  }
  const auto same = solve_symmetric(x, x, pen);
  const double gap = std::max(max_identity_gap(same.phi), max_identity_gap(same.psi));
  return {exact && gap <= 0.01,
          std::string(exact ? "phi+psi=2t exact" : "phi+psi!=2t") + fmt(", x=y gap %.2e", gap)};
}

double sine_wave(double t) { return std::sin(2.0 * std::numbers::pi * t); }
double square_wave(double t) { return std::sin(2.0 * std::numbers::pi * t) >= 0.0 ? 1.0 : -1.0; }
double triangle_wave(double t) {
  const double u = t - std::floor(t);
  return u < 0.25 ? 4 * u : (u < 0.75 ? 2 - 4 * u : 4 * u - 4);
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i]) return false;
    if (ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

Outcome clustering() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> phase(-0.08, 0.08);
  std::uniform_real_distribution<double> amp(0.9, 1.1);
  const std::function<double(double)> shapes[] = {sine_wave, square_wave, triangle_wave};
  std::vector<SignalXd> group;
  std::vector<int> truth;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) {
      const double p = phase(rng);
      const double a = amp(rng);
      // Phase offset that tapers to zero at both ends, so the ends still match.
      group.push_back(sample(
          [&](double t) { return a * shapes[c](t + p * std::sin(std::numbers::pi * t)); }, 100));
      truth.push_back(c);
    }
  }
  SolveParams params;
  params.M = 40;
  params.N = 80;
  int hits = 0;
  std::string seeds;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = cluster(group, 3, PenaltySpec::defaults(), params, 5, seed);
    const bool ok = same_partition(r.assignments, truth);
    hits += ok;
    seeds += ok ? "+" : "-";
  }
  return {hits >= 3, fmt("%.0f of 5 seeds recover the partition", hits) + " (" + seeds + ")"};
}

Outcome second_order_reduction() {
  std::mt19937_64 rng(1011);
  double worst = 0.0;
  int compared = 0;
  for (int k = 0; k < 60; ++k) {
    Instance inst = random_instance(rng, 4 + k % 8, 2 + k % 9);
    inst.pen.lambda_inst2 = 0.0;
    const WarpProblem p{inst.x, inst.y, inst.pen};
    double first = 0.0;
    try {
      first = shortest_path(p, inst.grid).objective;
    } catch (const InfeasibleError&) {
      continue;
    }
    const double second = shortest_path_second_order(p, inst.grid).objective;
    worst = std::max(worst, std::abs(second - first) / std::max(std::abs(first), 1e-300));
    ++compared;
  }
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> hs(1e-3, 1);
  double formula = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng), h = hs(rng);
    const double even = second_difference_even(a, b, c, h);
    formula = std::max(formula,
                       std::abs(second_difference(a, b, c, h, h) - even) / std::max(1.0, std::abs(even)));
  }
  return {compared > 0 && worst <= 1e-9 && formula <= 1e-12,
          fmt("%.0f grids, worst rel gap %.2e, formula gap %.2e", compared, worst, formula)};
}

Outcome validation_plumbing() {
  int broken = 0;
  std::mt19937_64 rng(1012);
  std::uniform_int_distribution<int> len(4, 200);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::VectorXd t = uniform_times(len(rng));
    const auto s = split_times(t, frac(rng), seed);
    auto ends_ok = [](const Eigen::VectorXd& v) {
      return v.size() >= 3 && v(0) == 0.0 && v(v.size() - 1) == 1.0 &&
             std::is_sorted(v.data(), v.data() + v.size());
    };
    if (!ends_ok(s.train) || !ends_ok(s.test)) ++broken;
    std::vector<double> merged(s.train.data() + 1, s.train.data() + s.train.size() - 1);
    merged.insert(merged.end(), s.test.data() + 1, s.test.data() + s.test.size() - 1);
    std::sort(merged.begin(), merged.end());
    const std::vector<double> interior(t.data() + 1, t.data() + t.size() - 1);
    if (merged != interior) ++broken;
    const auto again = split_times(t, 0.5, seed);
    if (again.train != split_times(t, 0.5, seed).train) ++broken;
  }
  const auto x = sample(tw_test::smooth, 200);
  const auto split = split_times(stage_times_for(x, {}), 0.5, 3);
  const auto r = train_test_losses(x, x, PenaltySpec::defaults(), {}, split);
  return {broken == 0 && r.train <= 1e-3 && r.test <= 1e-3,
          fmt("%.0f broken splits, train %.2e, test %.2e", broken, r.train, r.test)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dp exactness vs enumeration", dp_vs_enumeration},
      {"identity recovery", identity_recovery},
      {"ground-truth warp recovery", ground_truth_recovery},
      {"refinement monotonicity", refinement_monotone},
      {"performance N=1000 M=100", performance},
      {"centering exactness", centering},
      {"alignment monotonicity", alignment_monotone},
      {"lasso sparsification", lasso},
      {"symmetric warping", symmetric},
      {"clustering recovery", clustering},
      {"second-order reduction", second_order_reduction},
      {"validation plumbing", validation_plumbing},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%-4s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
