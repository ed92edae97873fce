/* Copyright 2026 The StreetNav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// streetnav command-line interface.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "streetnav/common/error.hpp"
#include "streetnav/harness/config.hpp"
#include "streetnav/harness/experiment.hpp"

namespace {

using streetnav::harness::Config;

std::string describe_keys() {
  std::string out = "Configuration keys (key = default):\n";
  for (const auto& k : streetnav::harness::config_schema()) {
    out += "  " + std::string(k.name) + " = " + std::string(k.default_value) + "    " + std::string(k.help) + "\n";
  }
  return out;
}

std::string describe_command(std::string_view name) {
  static const std::map<std::string_view, std::string_view> kHelp = {
      {"gen-world", "generate a synthetic dataset into 'data'"},
      {"train-sdr", "train an SDR model and save its checkpoint"},
      {"eval-sdr", "evaluate an SDR model or baseline on 'split'"},
      {"train-nav", "train a navigation model and save its checkpoint"},
      {"eval-nav", "evaluate a navigation model or baseline on 'split'"},
      {"full-task", "navigate, then resolve the description at the stopping point"},
      {"metrics", "recompute the metrics of the report named by 'input'"},
      {"gradcheck", "finite-difference checks of every primitive and model loss"},
  };
  const auto it = kHelp.find(name);
  return it == kHelp.end() ? "" : std::string(it->second);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Street-level navigation and spatial description resolution experiments"};
  app.require_subcommand(1, 1);
  app.footer(describe_keys());

  std::string config_file, out_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool deterministic = false, quiet = false;

  for (std::string_view name : streetnav::harness::commands()) {
    CLI::App* sub = app.add_subcommand(std::string(name), describe_command(name));
    sub->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_file, "also write the JSON report here");
    sub->add_flag("--deterministic", deterministic, "single-threaded, reproducible run");
    sub->add_option("--workers", workers, "navigation training threads")->check(CLI::PositiveNumber);
    sub->add_option("--set", overrides, "override a configuration key (key=value), repeatable");
    sub->add_flag("--quiet", quiet, "no progress output");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Config config;
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& o : overrides) config.apply_override(o);
    if (seed) config.set("seed", std::to_string(*seed));
    if (workers) config.set("workers", std::to_string(*workers));
    if (deterministic) config.set("deterministic", "true");

    const auto report = streetnav::harness::run_experiment(command, config, quiet ? nullptr : &std::cerr);
    const std::string text = streetnav::harness::render(report);
    std::cout << text;
    if (!out_file.empty()) {
      std::ofstream out(out_file, std::ios::binary);
      out << text;
      if (!out) throw streetnav::Error("cannot write report to '" + out_file + "'");
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "streetnav " << command << ": error: " << e.what() << "\n";
    return 1;
  }
}
