// tools/driftlab.cpp

// Copyright 2026  Driftlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "driftlab/errors.hpp"
#include "driftlab/evaluation.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/gradcheck.hpp"
#include "driftlab/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& config_path, const std::string& out_override,
            bool seed_set, std::uint64_t seed_override) {
  driftlab::ExperimentConfig cfg = driftlab::parse_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (seed_set) cfg.master_seed = seed_override;
  const auto artifacts = driftlab::run_experiment(cfg);
  std::cout << "driftlab: wrote " << artifacts.files.size() << " files to "
            << artifacts.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const driftlab::ExperimentConfig cfg = driftlab::parse_config(config_path);
  std::cout << driftlab::config_to_json_text(cfg);
  return kExitOk;
}

int cmd_gradcheck() {
  const auto reports = driftlab::run_gradient_suite();
  bool all_pass = true;
  for (const auto& report : reports) {
    std::printf("%-28s max_rel_err %.3e  %s\n", report.name.c_str(), report.max_rel_err,
                report.pass ? "ok" : "FAIL");
    all_pass = all_pass && report.pass;
  }
  std::printf("gradcheck: %zu checks, %s\n", reports.size(), all_pass ? "all ok" : "FAILURES");
  return all_pass ? kExitOk : kExitRuntime;
}

int cmd_eer(const std::string& scores_path) {
  const auto trials = driftlab::scores_from_csv(driftlab::read_file(scores_path));
  const auto result = driftlab::compute_eer(driftlab::to_score_set(trials));
  std::printf("EER %.4f%% at threshold %s (%d target, %d nontarget trials)\n",
              100.0 * result.eer, driftlab::format_double(result.threshold).c_str(),
              result.n_target, result.n_nontarget);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedding-space anonymization experiments: pool anonymizer, "
               "vocoder-surrogate channels, EER evaluation and attack models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Path to the config JSON")->required();
  auto* out_opt = run->add_option("--out", out_override, "Override output_dir");
  auto* seed_opt = run->add_option("--seed", seed_override, "Override master_seed");

  auto* validate = app.add_subcommand("validate", "Validate a config and print it resolved");
  validate->add_option("config", config_path, "Path to the config JSON")->required();

  app.add_subcommand("gradcheck", "Run the finite-difference gradient suite");

  std::string scores_path;
  auto* eer = app.add_subcommand("eer", "Compute the EER of an external scores.csv");
  eer->add_option("scores", scores_path, "Path to a scores.csv file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("run")) {
      return cmd_run(config_path, out_opt->count() > 0 ? out_override : "",
                     seed_opt->count() > 0, seed_override);
    }
    if (app.got_subcommand("validate")) return cmd_validate(config_path);
    if (app.got_subcommand("gradcheck")) return cmd_gradcheck();
    if (app.got_subcommand("eer")) return cmd_eer(scores_path);
  } catch (const driftlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
