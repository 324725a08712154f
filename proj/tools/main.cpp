#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Regularized time warping of sampled signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> inputs;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;

  const char* commands[][2] = {
      {"warp", "Fit a warp of the first input onto the second"},
      {"distance", "Time-warped distance from the first input to the second"},
      {"validate", "Train/test losses on a random split of the stage times"},
      {"grid-search", "Sweep lambda_cum x lambda_inst and report test losses"},
      {"align", "Align a group of signals to a learned target"},
      {"cluster", "Time-warped K-means over the inputs"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--input", inputs, "Signal CSV files")->expected(1, -1);
    sub->add_option("--output", output_dir, "Output directory");
    sub->add_option("--seed", seed, "Seed for splits and cluster init");
    sub->add_option("--set", overrides, "Override one config key (key=value)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : timewarp::cli::bad_input;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const nlohmann::json file_config =
        config_path.empty() ? nlohmann::json::object() : timewarp::cli::read_config_file(config_path);
    const auto job =
        timewarp::cli::build_config(command, file_config, overrides, inputs, output_dir, seed);
    return timewarp::cli::run_job(job, std::cout, std::cerr);
  } catch (const timewarp::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return timewarp::cli::bad_input;
  }
}
