#include "timewarp/alignment.hpp"

#include "timewarp/errors.hpp"
#include "timewarp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace timewarp {

namespace {

constexpr double kStopTolerance = 1e-7;
constexpr int kScanPoints = 201;
constexpr double kSearchTolerance = 1e-8;

using Samples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double stage_cost(const Eigen::MatrixXd& values, const LossSpec& loss,
                  const Eigen::VectorXd& taus, double t, const Eigen::VectorXd& mu) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    total += loss_value(loss, values.row(i).transpose(), mu, taus(i), t);
  }
  return total;
}

Eigen::VectorXd coordinate_median(const Eigen::MatrixXd& values) {
  Eigen::VectorXd mu(values.cols());
  std::vector<double> col(static_cast<size_t>(values.rows()));
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) col[static_cast<size_t>(i)] = values(i, c);
    std::sort(col.begin(), col.end());
    const size_t n = col.size();
    mu(c) = n % 2 == 1 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return mu;
}

// Cyclic coordinate search: grid scan over the hull of each coordinate,
// then golden-section refinement around the best scan point.
Eigen::VectorXd coordinate_search(const Eigen::MatrixXd& values, const LossSpec& loss,
                                  const Eigen::VectorXd& taus, double t) {
  Eigen::VectorXd mu = values.colwise().mean().transpose();
  const int sweeps = values.cols() == 1 ? 1 : 3;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double lo = values.col(c).minCoeff();
      const double hi = values.col(c).maxCoeff();
      if (lo == hi) {
        mu(c) = lo;
        continue;
      }
      auto f = [&](double v) {
        Eigen::VectorXd m = mu;
        m(c) = v;
        return stage_cost(values, loss, taus, t, m);
      };
      const double h = (hi - lo) / (kScanPoints - 1);
      int best = 0;
      double best_f = f(lo);
      for (int k = 1; k < kScanPoints; ++k) {
        const double fk = f(lo + h * k);
        if (fk < best_f) {
          best = k;
          best_f = fk;
        }
      }
      double a = lo + h * std::max(best - 1, 0);
      double b = lo + h * std::min(best + 1, kScanPoints - 1);
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double x1 = b - inv_phi * (b - a);
      double x2 = a + inv_phi * (b - a);
      double f1 = f(x1);
      double f2 = f(x2);
      while (b - a > kSearchTolerance) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - inv_phi * (b - a);
          f1 = f(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + inv_phi * (b - a);
          f2 = f(x2);
        }
      }
      const double golden = 0.5 * (a + b);
      mu(c) = f(golden) <= best_f ? golden : lo + h * best;
    }
  }
  return mu;
}

// Warped samples x_i(phi_i(t_k)) as an N x d matrix.
Samples warped_samples(const SignalXd& x, const WarpFunctionXd& phi, const Eigen::VectorXd& t) {
  Samples out(t.size(), x.dim());
  for (Eigen::Index k = 0; k < t.size(); ++k) out.row(k) = x(phi(t(k))).transpose();
  return out;
}

double signal_objective(const SignalXd& x, const SignalXd& target, const PenaltySpec& pen,
                        const Eigen::VectorXd& t, const WarpFunctionXd& phi) {
  return evaluate_objective(WarpProblem{x, target, pen, false}, t, phi(t)).total;
}

// Per-stage target over the given members. With `previous`, a stage keeps
// its old value unless the new one is no worse.
Samples stage_targets(std::span<const Samples> samples, std::span<const WarpFunctionXd> warps,
                      const std::vector<size_t>& members, const LossSpec& loss,
                      const Eigen::VectorXd& t, const Samples* previous) {
  const Eigen::Index n = t.size();
  const Eigen::Index d = samples[members.front()].cols();
  const auto count = static_cast<Eigen::Index>(members.size());
  Samples mu(n, d);
  Eigen::MatrixXd values(count, d);
  Eigen::VectorXd taus(count);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index r = 0; r < count; ++r) {
      const size_t i = members[static_cast<size_t>(r)];
      values.row(r) = samples[i].row(k);
      taus(r) = warps[i](t(k));
    }
    Eigen::VectorXd candidate = update_target(values, loss, taus, t(k));
    if (previous) {
      const Eigen::VectorXd old = previous->row(k).transpose();
      if (stage_cost(values, loss, taus, t(k), candidate) > stage_cost(values, loss, taus, t(k), old)) {
        candidate = old;
      }
    }
    mu.row(k) = candidate.transpose();
  }
  return mu;
}

void check_group(std::span<const SignalXd> signals, const PenaltySpec& penalties,
                 const SolveParams& params, int rounds) {
  if (signals.empty()) throw std::invalid_argument("need at least one signal");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  penalties.validate();
  params.validate();
  for (const SignalXd& s : signals) {
    if (s.dim() != signals.front().dim()) {
      throw std::invalid_argument("all signals must have the same dimension");
    }
  }
}

bool converged(const std::vector<double>& history) {
  if (history.size() < 2) return false;
  const double prev = history[history.size() - 2];
  return prev - history.back() <= kStopTolerance * std::abs(prev);
}

// Solve x against target and keep whichever of the new and old warp is better.
void improve_warp(const SignalXd& x, const SignalXd& target, const PenaltySpec& pen,
                  const SolveParams& sp, const Eigen::VectorXd& t, WarpFunctionXd& phi,
                  double& objective, size_t index) {
  SolveResult r;
  try {
    r = solve(x, target, pen, sp);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError("signal " + std::to_string(index) + ": " + e.what(), e.stage());
  }
  const double old = signal_objective(x, target, pen, t, phi);
  if (r.components.total <= old) {
    phi = r.warp;
    objective = r.components.total;
  } else {
    objective = old;
  }
}

}  // namespace

Eigen::VectorXd group_stage_times(std::span<const SignalXd> signals, const SolveParams& params) {
  if (params.stage_times) return *params.stage_times;
  if (params.N) return uniform_times(*params.N);
  Eigen::Index n = 16;
  for (const SignalXd& s : signals) n = std::max(n, s.size());
  return uniform_times(n);
}

Eigen::VectorXd update_target(const Eigen::MatrixXd& values, const LossSpec& loss,
                              const Eigen::VectorXd& taus, double t) {
  if (values.rows() < 1) throw std::invalid_argument("update_target needs at least one value");
  switch (loss.kind) {
    case LossKind::squared_l2:
      return values.colwise().mean().transpose();
    case LossKind::l1:
      return coordinate_median(values);
    default:
      return coordinate_search(values, loss, taus, t);
  }
}

Eigen::VectorXd update_target(const Eigen::MatrixXd& values, const LossSpec& loss) {
  return update_target(values, loss, Eigen::VectorXd::Zero(values.rows()), 0.0);
}

std::vector<WarpFunctionXd> recenter(std::span<const WarpFunctionXd> warps) {
  if (warps.empty()) throw std::invalid_argument("recenter needs at least one warp");
  std::vector<double> knots;
  for (const WarpFunctionXd& w : warps) knots.insert(knots.end(), w.t().begin(), w.t().end());
  std::sort(knots.begin(), knots.end());
  // Knots from different grids can differ by rounding only; keep one of each.
  const double last = knots.back();
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return b - a <= 1e-12; }),
              knots.end());
  knots.back() = last;

  const auto n = static_cast<Eigen::Index>(knots.size());
  const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(knots.data(), n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::VectorXd> values;
  values.reserve(warps.size());
  for (const WarpFunctionXd& w : warps) {
    values.push_back(w(s));
    mean += values.back();
  }
  mean /= static_cast<double>(warps.size());
  for (Eigen::Index k = 1; k < n; ++k) {
    if (!(mean(k) > mean(k - 1))) {
      throw std::invalid_argument("mean warp is not strictly increasing near t=" +
                                  std::to_string(s(k)) + "; cannot recenter");
    }
  }

  // phi_i o m^{-1} is linear between consecutive m(s_k), with value phi_i(s_k) at m(s_k).
  std::vector<WarpFunctionXd> out;
  out.reserve(warps.size());
  for (const Eigen::VectorXd& v : values) out.emplace_back(mean, v);
  return out;
}

double max_pairwise_inconsistency(std::span<const WarpFunctionXd> warps, int probes) {
  const Eigen::VectorXd s = uniform_times(std::max(probes, 2));
  std::vector<WarpFunctionXd> inverses;
  inverses.reserve(warps.size());
  for (const WarpFunctionXd& w : warps) inverses.push_back(inverse(w));
  double worst = 0.0;
  for (size_t i = 0; i < warps.size(); ++i) {
    for (size_t j = 0; j < warps.size(); ++j) {
      if (i == j) continue;
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        worst = std::max(worst, std::abs(warps[i](inverses[j](s(k))) - s(k)));
      }
    }
  }
  return worst;
}

AlignmentResult align(std::span<const SignalXd> signals, const PenaltySpec& penalties,
                      const SolveParams& params, int rounds, bool centered) {
  check_group(signals, penalties, params, rounds);
  const Eigen::VectorXd t = group_stage_times(signals, params);
  SolveParams sp = params;
  sp.stage_times = t;

  const size_t count = signals.size();
  std::vector<WarpFunctionXd> warps(count, WarpFunctionXd::identity(t));
  std::vector<Samples> samples(count);
  for (size_t i = 0; i < count; ++i) samples[i] = warped_samples(signals[i], warps[i], t);
  std::vector<size_t> everyone(count);
  for (size_t i = 0; i < count; ++i) everyone[i] = i;

  Samples mu = stage_targets(samples, warps, everyone, penalties.loss, t, nullptr);
  AlignmentResult result;
  result.target = SignalXd::from_samples(t, mu);

  std::vector<double> objectives(count, 0.0);
  for (int round = 0; round < rounds; ++round) {
    detail::parallel_for(count, [&](size_t i) {
      improve_warp(signals[i], result.target, penalties, sp, t, warps[i], objectives[i], i);
    });
    if (centered) {
      const std::vector<WarpFunctionXd> centered_warps = recenter(warps);
      for (size_t i = 0; i < count; ++i) warps[i] = centered_warps[i].resample(t);
    }
    for (size_t i = 0; i < count; ++i) samples[i] = warped_samples(signals[i], warps[i], t);
    mu = stage_targets(samples, warps, everyone, penalties.loss, t, &mu);
    result.target = SignalXd::from_samples(t, mu);

    double total = 0.0;
    for (size_t i = 0; i < count; ++i) {
      total += signal_objective(signals[i], result.target, penalties, t, warps[i]);
    }
    result.history.push_back(total);
    result.warps_per_round.push_back(warps);
    result.rounds = round + 1;
    if (converged(result.history)) break;
  }
  result.warps = std::move(warps);
  return result;
}

ClusterResult cluster(std::span<const SignalXd> signals, int K, const PenaltySpec& penalties,
                      const SolveParams& params, int rounds, std::uint64_t seed) {
  check_group(signals, penalties, params, rounds);
  const size_t count = signals.size();
  if (K < 1 || static_cast<size_t>(K) > count) {
    throw std::invalid_argument("K must lie in [1, " + std::to_string(count) + "], got " +
                                std::to_string(K));
  }
  const auto clusters = static_cast<size_t>(K);
  const Eigen::VectorXd t = group_stage_times(signals, params);
  SolveParams sp = params;
  sp.stage_times = t;

  std::vector<WarpFunctionXd> warps(count, WarpFunctionXd::identity(t));
  std::vector<Samples> samples(count);
  for (size_t i = 0; i < count; ++i) samples[i] = warped_samples(signals[i], warps[i], t);

  // k-means++ seeding under the time-warped distance; the distances to the
  // seeds also give the initial assignment.
  std::mt19937_64 rng(seed);
  std::vector<size_t> seeds{static_cast<size_t>(rng() % count)};
  std::vector<std::vector<double>> to_seed(count);
  auto add_distances = [&](size_t s) {
    std::vector<double> d(count, 0.0);
    detail::parallel_for(count, [&](size_t i) {
      if (i == s) return;
      try {
        d[i] = distance(signals[i], signals[s], penalties, sp);
      } catch (const InfeasibleError&) {
        d[i] = std::numeric_limits<double>::infinity();
      }
    });
    for (size_t i = 0; i < count; ++i) to_seed[i].push_back(i == s ? -1.0 : d[i]);
  };
  if (clusters > 1) add_distances(seeds.back());
  while (seeds.size() < clusters) {
    std::vector<double> weight(count, 0.0);
    double total = 0.0;
    size_t farthest = count;
    for (size_t i = 0; i < count; ++i) {
      if (std::find(seeds.begin(), seeds.end(), i) != seeds.end()) continue;
      const double nearest = *std::min_element(to_seed[i].begin(), to_seed[i].end());
      if (farthest == count || nearest > weight[farthest]) farthest = i;
      weight[i] = nearest;
      total += nearest;
    }
    size_t pick = farthest;
    if (std::isfinite(total) && total > 0.0) {
      // Own draw rather than std::discrete_distribution, whose output is
      // implementation-defined.
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (size_t i = 0; i < count; ++i) {
        if (weight[i] <= 0.0) continue;
        pick = i;
        if ((u -= weight[i]) < 0.0) break;
      }
    }
    seeds.push_back(pick);
    add_distances(pick);
  }

  ClusterResult result;
  result.assignments.assign(count, 0);
  for (size_t i = 0; i < count && clusters > 1; ++i) {
    const auto& d = to_seed[i];
    result.assignments[i] = static_cast<int>(std::min_element(d.begin(), d.end()) - d.begin());
  }
  auto members_of = [&](size_t j) {
    std::vector<size_t> m;
    for (size_t i = 0; i < count; ++i) {
      if (result.assignments[i] == static_cast<int>(j)) m.push_back(i);
    }
    return m;
  };

  std::vector<Samples> template_values(clusters);
  result.templates.resize(clusters);
  for (size_t j = 0; j < clusters; ++j) {
    template_values[j] = stage_targets(samples, warps, members_of(j), penalties.loss, t, nullptr);
    result.templates[j] = SignalXd::from_samples(t, template_values[j]);
  }

  std::vector<double> objectives(count, 0.0);
  for (int round = 0; round < rounds; ++round) {
    // Warps given templates and assignments.
    detail::parallel_for(count, [&](size_t i) {
      improve_warp(signals[i], result.templates[static_cast<size_t>(result.assignments[i])],
                   penalties, sp, t, warps[i], objectives[i], i);
    });
    for (size_t i = 0; i < count; ++i) samples[i] = warped_samples(signals[i], warps[i], t);

    // Templates given warps and assignments.
    for (size_t j = 0; j < clusters; ++j) {
      const std::vector<size_t> members = members_of(j);
      if (members.empty()) continue;
      template_values[j] =
          stage_targets(samples, warps, members, penalties.loss, t, &template_values[j]);
      result.templates[j] = SignalXd::from_samples(t, template_values[j]);
    }

    // Assignments: the current template with the current warp competes with
    // a fresh solve against every other template.
    std::vector<std::vector<double>> score(count, std::vector<double>(clusters));
    std::vector<std::vector<WarpFunctionXd>> candidate(count,
                                                       std::vector<WarpFunctionXd>(clusters));
    detail::parallel_for(count * clusters, [&](size_t cell) {
      const size_t i = cell / clusters;
      const size_t j = cell % clusters;
      if (static_cast<int>(j) == result.assignments[i]) {
        score[i][j] = signal_objective(signals[i], result.templates[j], penalties, t, warps[i]);
        candidate[i][j] = warps[i];
        return;
      }
      try {
        SolveResult r = solve(signals[i], result.templates[j], penalties, sp);
        score[i][j] = r.components.total;
        candidate[i][j] = std::move(r.warp);
      } catch (const InfeasibleError&) {
        score[i][j] = std::numeric_limits<double>::infinity();
      }
    });
    for (size_t i = 0; i < count; ++i) {
      size_t best = static_cast<size_t>(result.assignments[i]);
      for (size_t j = 0; j < clusters; ++j) {
        if (score[i][j] < score[i][best] || (score[i][j] == score[i][best] && j < best)) best = j;
      }
      result.assignments[i] = static_cast<int>(best);
      warps[i] = candidate[i][best];
      objectives[i] = score[i][best];
    }

    // Reseed empty clusters with the worst-fitting signal of a shared cluster.
    for (size_t j = 0; j < clusters; ++j) {
      if (!members_of(j).empty()) continue;
      size_t worst = count;
      for (size_t i = 0; i < count; ++i) {
        if (members_of(static_cast<size_t>(result.assignments[i])).size() < 2) continue;
        if (worst == count || objectives[i] > objectives[worst]) worst = i;
      }
      if (worst == count) break;
      template_values[j] = warped_samples(signals[worst], warps[worst], t);
      result.templates[j] = SignalXd::from_samples(t, template_values[j]);
      result.assignments[worst] = static_cast<int>(j);
      objectives[worst] = signal_objective(signals[worst], result.templates[j], penalties, t,
                                           warps[worst]);
    }

    double total = 0.0;
    for (size_t i = 0; i < count; ++i) {
      total += signal_objective(signals[i],
                                result.templates[static_cast<size_t>(result.assignments[i])],
                                penalties, t, warps[i]);
    }
    result.history.push_back(total);
    result.rounds = round + 1;
    if (converged(result.history)) break;
  }
  result.warps = std::move(warps);
  return result;
}

}  // namespace timewarp
