// kinetics <subcommand> --config FILE [--output-dir D] [--seed S] [--threads K]

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kinetics/cli.hpp"
#include "kinetics/errors.hpp"
#include "kinetics/parallel.hpp"

namespace {

int dispatch(const std::string& subcommand, const std::string& config_path,
             const std::optional<std::string>& output_dir, const std::optional<std::uint64_t>& seed) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "kinetics: cannot read config '" << config_path << "'\n";
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();

  kinetics::cli::RunConfig config;
  try {
    config = kinetics::cli::parse_config(text.str(), subcommand);
  } catch (const kinetics::ParseError& e) {
    std::cerr << "kinetics: " << config_path << ":" << e.line() << ": " << e.what() << '\n';
    return 1;
  } catch (const kinetics::InvalidInput& e) {
    std::cerr << "kinetics: " << config_path << ": " << e.what() << '\n';
    return 1;
  }
  if (output_dir) config.output_dir = *output_dir;
  if (seed) config.seed = *seed;
  return kinetics::cli::run(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic theory toolkit: collisions, collision operator, DSMC, transport, audit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  const std::map<std::string, std::string> about = {
      {"collide", "Apply the binary collision rule to listed or random events"},
      {"operator", "Estimate the collision operator and its moment rates on a velocity grid"},
      {"dsmc", "Run a homogeneous DSMC simulation and record the time series"},
      {"transport", "Advect a phase-space density under a constant force"},
      {"audit", "Grade the physical claims against numerical evidence"}};
  for (const std::string& name : kinetics::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--output-dir", output_dir, "Directory for outputs (overrides config)");
    sub->add_option("--seed", seed, "Random seed (overrides config)");
    sub->add_option("--threads", threads, "Worker thread cap (default: all cores)")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (threads > 0) kinetics::set_thread_cap(threads);
  return dispatch(app.get_subcommands().front()->get_name(), config_path, output_dir, seed);
}
