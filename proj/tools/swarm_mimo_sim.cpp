// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#include <swarm_mimo/cli/experiments.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef SWARM_MIMO_VERSION
#define SWARM_MIMO_VERSION "unknown"
#endif

namespace {

enum Exit { ok = 0, usage = 1, config = 2, domain = 3, io = 4, internal = 5 };

std::string read_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open config " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

} // namespace

int main(int argc, char **argv) {
  namespace cli = swarm_mimo::cli;
  CLI::App app{"Line-of-sight massive MIMO simulator for UAV swarm uplinks"};
  app.footer("Exit status: 0 ok, 1 usage, 2 config, 3 domain or infeasible, 4 I/O, 5 internal.\n"
             "SWARM_MIMO_THREADS caps worker threads.\n\nConfig keys and defaults:" +
             cli::help_text());
  app.set_version_flag("--version", SWARM_MIMO_VERSION);

  std::string experiment, config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool print_config = false;
  std::vector<std::string> names;
  for (const auto &[k, n] : cli::experiment_names()) names.push_back(n);
  app.add_option("experiment", experiment, "experiment to run")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("-c,--config", config_path, "INI config file");
  app.add_option("-s,--seed", seed, "override experiment.seed");
  app.add_option("-o,--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::usage;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    cli::ExperimentConfig cfg = cli::parse_config(text, cli::parse_kind(experiment));
    if (seed) cfg.set("experiment.seed", std::to_string(*seed));
    if (print_config) {
      std::cout << cli::serialize_config(cfg);
      return Exit::ok;
    }
    const auto out = cli::run_experiment(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cli::write_artifacts(out, cfg, out_dir, SWARM_MIMO_VERSION, wall);
    std::cout << out.summary.dump() << "\n";
    return Exit::ok;
  } catch (const swarm_mimo::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::config;
  } catch (const swarm_mimo::Error &e) {
    std::cerr << experiment << " failed: " << e.what() << "\n";
    return Exit::domain;
  } catch (const std::ios_base::failure &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return Exit::io;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return Exit::io;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return Exit::internal;
  }
}
