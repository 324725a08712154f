#include "commands.hpp"

#include "csv_io.hpp"
#include "svg_plot.hpp"

#include "timewarp/alignment.hpp"
#include "timewarp/errors.hpp"
#include "timewarp/solver.hpp"
#include "timewarp/validation.hpp"

#include <filesystem>
#include <ostream>

namespace timewarp::cli {

namespace {

using json = nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const ObjectiveBreakdown& c) {
  return {{"loss", c.loss}, {"cum", c.cum}, {"inst", c.inst}, {"inst2", c.inst2},
          {"total", c.total}};
}

json to_json(const WarpFunctionXd& w) { return {{"t", to_json(w.t())}, {"tau", to_json(w.tau())}}; }

json to_json(const SignalXd& s) {
  return {{"t", to_json(s.knot_times())},
          {"values", to_json(Eigen::MatrixXd(s.knot_values()))}};
}

std::string out_path(const JobConfig& job, const std::string& name) {
  return (std::filesystem::path(job.output_dir) / name).string();
}

void write_json(const JobConfig& job, const std::string& name, const json& doc) {
  write_atomic(out_path(job, name), doc.dump(2) + "\n");
}

std::vector<CsvSignal> read_inputs(const JobConfig& job, std::size_t min_count,
                                   std::size_t max_count) {
  const std::size_t n = job.inputs.size();
  if (n < min_count || n > max_count) {
    const std::string want = min_count == max_count
                                 ? std::to_string(min_count)
                                 : "at least " + std::to_string(min_count);
    throw ConfigError("'" + job.command + "' expects " + want + " --input files, got " +
                      std::to_string(n));
  }
  std::vector<CsvSignal> out;
  out.reserve(n);
  for (const auto& path : job.inputs) out.push_back(read_signal_csv(path));
  const Eigen::Index dim = out.front().signal.dim();
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].signal.dim() != dim) {
      throw ConfigError("input '" + job.inputs[k] + "' has " +
                        std::to_string(out[k].signal.dim()) + " value columns, expected " +
                        std::to_string(dim));
    }
  }
  return out;
}

std::vector<SignalXd> signals_of(const std::vector<CsvSignal>& inputs) {
  std::vector<SignalXd> out;
  for (const auto& c : inputs) out.push_back(c.signal);
  return out;
}

json timing_json(const JobConfig& job, const SolveTiming& t) {
  if (!job.timing) return nullptr;
  return {{"node", t.node_seconds}, {"path", t.path_seconds}, {"total", t.total_seconds}};
}

void prepare_output(const JobConfig& job) {
  std::error_code ec;
  std::filesystem::create_directories(job.output_dir, ec);
  if (ec || !std::filesystem::is_directory(job.output_dir)) {
    throw ConfigError("cannot create output directory '" + job.output_dir + "'");
  }
}

}  // namespace

int cmd_warp(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 2, 2);
  const SignalXd& x = inputs[0].signal;
  const SignalXd& y = inputs[1].signal;
  const SolveResult r = solve(x, y, job.penalties, job.params);

  json doc;
  doc["objective"] = r.objective;
  doc["components"] = to_json(r.components);
  doc["tau"] = to_json(r.warp.tau());
  doc["t"] = to_json(r.warp.t());
  doc["history"] = r.history;
  doc["timing_seconds"] = timing_json(job, r.timing);
  write_json(job, "result.json", doc);

  if (job.plots) {
    const Eigen::VectorXd& t = r.warp.t();
    const Eigen::Index d = x.dim();
    Eigen::MatrixXd table(t.size(), 1 + 2 * d);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      table(i, 0) = t(i);
      table.row(i).segment(1, d) = x(r.warp.tau()(i)).transpose();
      table.row(i).segment(1 + d, d) = y(t(i)).transpose();
    }
    std::vector<std::string> header{"t"};
    for (Eigen::Index j = 0; j < d; ++j) header.push_back("x_warped_" + inputs[0].columns[j + 1]);
    for (Eigen::Index j = 0; j < d; ++j) header.push_back("y_" + inputs[1].columns[j + 1]);
    write_csv(out_path(job, "warped.csv"), header, table);
    write_atomic(out_path(job, "warp.svg"), render_warp(r.warp.t(), r.warp.tau()));
  }
  out << "objective " << format_double(r.objective) << "\n";
  return ok;
}

int cmd_distance(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 2, 2);
  const SolveResult r = solve(inputs[0].signal, inputs[1].signal, job.penalties, job.params);
  json doc;
  doc["distance"] = r.objective;
  doc["objective"] = r.objective;
  doc["components"] = to_json(r.components);
  doc["tau"] = to_json(r.warp.tau());
  doc["t"] = to_json(r.warp.t());
  doc["history"] = r.history;
  doc["timing_seconds"] = timing_json(job, r.timing);
  write_json(job, "distance.json", doc);
  out << "distance " << format_double(r.objective) << "\n";
  return ok;
}

int cmd_validate(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 2, 2);
  const SignalXd& x = inputs[0].signal;
  const SignalXd& y = inputs[1].signal;
  const TimeSplit split = split_times(stage_times_for(y, job.params), job.test_fraction, job.seed);
  const TrainTestLosses r = train_test_losses(x, y, job.penalties, job.params, split);
  json doc;
  doc["train_loss"] = r.train;
  doc["test_loss"] = r.test;
  doc["seed"] = job.seed;
  doc["train_times"] = to_json(split.train);
  doc["test_times"] = to_json(split.test);
  doc["objective"] = r.fit.objective;
  doc["components"] = to_json(r.fit.components);
  doc["tau"] = to_json(r.fit.warp.tau());
  doc["t"] = to_json(r.fit.warp.t());
  doc["history"] = r.fit.history;
  doc["timing_seconds"] = timing_json(job, r.fit.timing);
  write_json(job, "validate.json", doc);
  out << "train_loss " << format_double(r.train) << "\ntest_loss " << format_double(r.test)
      << "\n";
  return ok;
}

int cmd_grid_search(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 2, 2);
  const SignalXd& x = inputs[0].signal;
  const SignalXd& y = inputs[1].signal;
  const TimeSplit split = split_times(stage_times_for(y, job.params), job.test_fraction, job.seed);
  const ValidationReport r =
      grid_search(x, y, job.penalties, job.params, job.lambda_cum_grid, job.lambda_inst_grid, split);

  const auto [bi, bj] = r.best_test_loss;
  json doc;
  doc["lambda_cum"] = r.lambda_cum;
  doc["lambda_inst"] = r.lambda_inst;
  doc["train_loss"] = to_json(r.train_loss);
  doc["test_loss"] = to_json(r.test_loss);
  doc["seed"] = job.seed;
  doc["best"] = {{"lambda_cum", r.lambda_cum[static_cast<std::size_t>(bi)]},
                 {"lambda_inst", r.lambda_inst[static_cast<std::size_t>(bj)]},
                 {"test_loss", r.test_loss(bi, bj)},
                 {"train_loss", r.train_loss(bi, bj)}};
  write_json(job, "grid_search.json", doc);

  // Rows are lambda_cum, columns lambda_inst.
  std::vector<std::string> header{"lambda_cum"};
  for (double l : r.lambda_inst) header.push_back(format_double(l));
  Eigen::MatrixXd table(r.test_loss.rows(), r.test_loss.cols() + 1);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    table(i, 0) = r.lambda_cum[static_cast<std::size_t>(i)];
    table.row(i).tail(r.test_loss.cols()) = r.test_loss.row(i);
  }
  write_csv(out_path(job, "test_loss.csv"), header, table);
  out << "best lambda_cum " << format_double(r.lambda_cum[static_cast<std::size_t>(bi)])
      << " lambda_inst " << format_double(r.lambda_inst[static_cast<std::size_t>(bj)])
      << " test_loss " << format_double(r.test_loss(bi, bj)) << "\n";
  return ok;
}

int cmd_align(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 1, static_cast<std::size_t>(-1));
  const auto signals = signals_of(inputs);
  const AlignmentResult r = align(signals, job.penalties, job.params, job.rounds, job.centered);
  json doc;
  doc["target"] = to_json(r.target);
  json warps = json::array();
  for (const auto& w : r.warps) warps.push_back(to_json(w));
  doc["warps"] = warps;
  doc["inputs"] = job.inputs;
  doc["history"] = r.history;
  doc["rounds"] = r.rounds;
  doc["centered"] = job.centered;
  write_json(job, "align.json", doc);

  std::vector<std::string> header{"t"};
  for (std::size_t j = 1; j < inputs.front().columns.size(); ++j) {
    header.push_back(inputs.front().columns[j]);
  }
  Eigen::MatrixXd table(r.target.size(), 1 + r.target.dim());
  table.col(0) = r.target.knot_times();
  table.rightCols(r.target.dim()) = r.target.knot_values();
  write_csv(out_path(job, "target.csv"), header, table);
  out << "objective " << format_double(r.history.back()) << " rounds " << r.rounds << "\n";
  return ok;
}

int cmd_cluster(const JobConfig& job, std::ostream& out) {
  const auto inputs = read_inputs(job, 1, static_cast<std::size_t>(-1));
  if (static_cast<std::size_t>(job.K) > inputs.size()) {
    throw ConfigError("config key 'K' is " + std::to_string(job.K) + " but only " +
                      std::to_string(inputs.size()) + " signals were given");
  }
  const auto signals = signals_of(inputs);
  const ClusterResult r = cluster(signals, job.K, job.penalties, job.params, job.rounds, job.seed);
  json doc;
  doc["assignments"] = r.assignments;
  json templates = json::array();
  for (const auto& s : r.templates) templates.push_back(to_json(s));
  doc["templates"] = templates;
  json warps = json::array();
  for (const auto& w : r.warps) warps.push_back(to_json(w));
  doc["warps"] = warps;
  doc["inputs"] = job.inputs;
  doc["history"] = r.history;
  doc["rounds"] = r.rounds;
  doc["seed"] = job.seed;
  write_json(job, "cluster.json", doc);
  out << "objective " << format_double(r.history.back()) << " rounds " << r.rounds << "\n";
  return ok;
}

int run_job(const JobConfig& job, std::ostream& out, std::ostream& err) {
  try {
    prepare_output(job);
    if (job.command == "warp") return cmd_warp(job, out);
    if (job.command == "distance") return cmd_distance(job, out);
    if (job.command == "validate") return cmd_validate(job, out);
    if (job.command == "grid-search") return cmd_grid_search(job, out);
    if (job.command == "align") return cmd_align(job, out);
    if (job.command == "cluster") return cmd_cluster(job, out);
    err << "error: unknown command '" << job.command << "'\n";
    return bad_input;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return infeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return bad_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return bad_input;
  }
}

}  // namespace timewarp::cli
