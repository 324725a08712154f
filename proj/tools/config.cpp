#include "config.hpp"

#include "timewarp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace timewarp::cli {

namespace {

using json = nlohmann::json;

double get_number(const json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& v = cfg.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("config key '" + key + "' must be finite");
  return d;
}

long long get_integer(const json& cfg, const std::string& key, long long fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& v = cfg.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::isfinite(d)) return static_cast<long long>(d);
  }
  throw ConfigError("config key '" + key + "' must be an integer");
}

bool get_bool(const json& cfg, const std::string& key, bool fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  return cfg.at(key).get<bool>();
}

std::string get_string(const json& cfg, const std::string& key, const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return cfg.at(key).get<std::string>();
}

std::vector<double> get_list(const json& cfg, const std::string& key,
                             std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& v = cfg.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError("config key '" + key + "' must list numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError("config key '" + key + "' must be a list of numbers");
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' must not be empty");
  for (double d : out) {
    if (!std::isfinite(d) || d < 0.0) {
      throw ConfigError("config key '" + key + "' entries must be finite and nonnegative");
    }
  }
  return out;
}

RegularizerSpec parse_regularizer(const std::string& key, const std::string& name) {
  if (name == "square") return RegularizerSpec::square();
  if (name == "abs") return RegularizerSpec::abs();
  if (name == "zero") return RegularizerSpec::zero();
  if (name.rfind("custom:", 0) == 0) {
    const std::string hook = name.substr(7);
    try {
      return RegularizerSpec::custom_regularizer(hook, find_custom_regularizer(hook));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  throw ConfigError("config key '" + key + "' must be square, abs, zero or custom:<name>, got '" +
                    name + "'");
}

LossSpec parse_loss(const json& cfg) {
  const std::string name = get_string(cfg, "loss", "squared_l2");
  const double huber_m = get_number(cfg, "huber_m", 1.0);
  const double band_eps = get_number(cfg, "band_eps", 0.1);
  const std::string norm = get_string(cfg, "band_norm", "l2");
  if (norm != "l2" && norm != "linf") throw ConfigError("config key 'band_norm' must be l2 or linf");
  if (!(huber_m > 0.0)) throw ConfigError("config key 'huber_m' must be positive");
  if (!(band_eps > 0.0)) throw ConfigError("config key 'band_eps' must be positive");
  if (name == "squared_l2") return LossSpec::squared_l2();
  if (name == "l1") return LossSpec::l1();
  if (name == "huber") return LossSpec::huber(huber_m);
  if (name == "band") {
    return LossSpec::band(band_eps, norm == "l2" ? BandNorm::l2 : BandNorm::linf);
  }
  if (name.rfind("custom:", 0) == 0) {
    const std::string hook = name.substr(7);
    try {
      return LossSpec::custom_loss(hook, find_custom_loss(hook));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'loss': ") + e.what());
    }
  }
  throw ConfigError("config key 'loss' must be squared_l2, l1, huber, band or custom:<name>, got '" +
                    name + "'");
}

void check_weight(const std::string& key, double v) {
  if (v < 0.0) throw ConfigError("config key '" + key + "' must be nonnegative");
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "loss",       "huber_m",     "band_eps",     "band_norm",       "reg_cum",
      "reg_inst",   "reg_inst2",   "lambda_cum",   "lambda_inst",     "lambda_inst2",
      "M",          "eta",         "refinements",  "s_min",           "s_max",
      "beta",       "N",           "second_order", "test_fraction",   "seed",
      "lambda_cum_grid", "lambda_inst_grid", "rounds", "centered",    "K",
      "timing",     "plots"};
  return keys;
}

nlohmann::json parse_set_value(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  auto parse_number = [](const std::string& s, double& out) {
    std::istringstream in(s);
    in >> out;
    return !in.fail() && in.eof();
  };
  double d = 0.0;
  if (parse_number(text, d)) {
    if (std::floor(d) == d && std::abs(d) < 9e15 && text.find_first_of(".eE") == std::string::npos) {
      return static_cast<long long>(d);
    }
    return d;
  }
  if (text.find(',') != std::string::npos) {
    json list = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!parse_number(item, d)) return text;
      list.push_back(d);
    }
    return list;
  }
  return text;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  return cfg;
}

JobConfig build_config(const std::string& command, const nlohmann::json& file_config,
                       const std::vector<std::string>& overrides,
                       const std::vector<std::string>& inputs, const std::string& output_dir,
                       std::optional<std::uint64_t> seed) {
  json cfg = file_config.is_null() ? json::object() : file_config;
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + o + "'");
    }
    cfg[o.substr(0, eq)] = parse_set_value(o.substr(eq + 1));
  }
  const auto& keys = known_keys();
  for (const auto& item : cfg.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }

  JobConfig job;
  job.command = command;
  job.inputs = inputs;
  job.output_dir = output_dir;

  PenaltySpec& pen = job.penalties;
  pen.loss = parse_loss(cfg);
  pen.reg_cum = parse_regularizer("reg_cum", get_string(cfg, "reg_cum", "square"));
  const double s_min = get_number(cfg, "s_min", 0.001);
  const double s_max = get_number(cfg, "s_max", 10.0);
  if (!(s_min < s_max)) {
    throw ConfigError("config keys 's_min' and 's_max' require s_min < s_max (got " +
                      std::to_string(s_min) + " and " + std::to_string(s_max) + ")");
  }
  pen.reg_inst =
      parse_regularizer("reg_inst", get_string(cfg, "reg_inst", "square")).with_box(s_min, s_max);
  if (cfg.contains("reg_inst2")) {
    pen.reg_inst2 = parse_regularizer("reg_inst2", get_string(cfg, "reg_inst2", "square"));
  }
  pen.lambda_cum = get_number(cfg, "lambda_cum", 0.01);
  pen.lambda_inst = get_number(cfg, "lambda_inst", 0.1);
  pen.lambda_inst2 = get_number(cfg, "lambda_inst2", 0.0);
  check_weight("lambda_cum", pen.lambda_cum);
  check_weight("lambda_inst", pen.lambda_inst);
  check_weight("lambda_inst2", pen.lambda_inst2);

  SolveParams& p = job.params;
  p.M = get_integer(cfg, "M", 100);
  if (p.M < 2) throw ConfigError("config key 'M' must be at least 2");
  p.eta = get_number(cfg, "eta", 0.15);
  if (!(p.eta > 0.0 && p.eta < 1.0)) throw ConfigError("config key 'eta' must lie in (0, 1)");
  const long long refinements = get_integer(cfg, "refinements", 3);
  if (refinements < 0 || refinements > 1000) {
    throw ConfigError("config key 'refinements' must lie in [0, 1000]");
  }
  p.refinements = static_cast<int>(refinements);
  p.beta = get_number(cfg, "beta", 0.0);
  if (!(p.beta >= 0.0 && p.beta < 1.0)) throw ConfigError("config key 'beta' must lie in [0, 1)");
  if (cfg.contains("N")) {
    p.N = get_integer(cfg, "N", 0);
    if (*p.N < 2) throw ConfigError("config key 'N' must be at least 2");
  }
  p.second_order = get_bool(cfg, "second_order", false);
  if (p.second_order && p.M > p.dp.second_order_max_candidates) {
    throw ConfigError("config key 'M' must be at most " +
                      std::to_string(p.dp.second_order_max_candidates) +
                      " when second_order is set");
  }

  job.test_fraction = get_number(cfg, "test_fraction", 0.5);
  if (!(job.test_fraction > 0.0 && job.test_fraction < 1.0)) {
    throw ConfigError("config key 'test_fraction' must lie in (0, 1)");
  }
  const long long seed_value = get_integer(cfg, "seed", 0);
  if (seed_value < 0) throw ConfigError("config key 'seed' must be nonnegative");
  job.seed = seed ? *seed : static_cast<std::uint64_t>(seed_value);
  job.lambda_cum_grid = get_list(cfg, "lambda_cum_grid", log_space(1e-3, 1.0, 7));
  job.lambda_inst_grid = get_list(cfg, "lambda_inst_grid", log_space(1e-3, 1.0, 7));

  const long long rounds = get_integer(cfg, "rounds", 5);
  if (rounds < 1 || rounds > 10000) throw ConfigError("config key 'rounds' must lie in [1, 10000]");
  job.rounds = static_cast<int>(rounds);
  job.centered = get_bool(cfg, "centered", false);
  const long long k = get_integer(cfg, "K", 2);
  if (k < 1) throw ConfigError("config key 'K' must be at least 1");
  job.K = static_cast<int>(k);
  job.timing = get_bool(cfg, "timing", true);
  job.plots = get_bool(cfg, "plots", true);

  try {
    pen.validate();
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return job;
}

}  // namespace timewarp::cli
