/**
 * Copyright 2026 The bsv developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsv/bsv.hpp"

namespace {

void add_common_flags(CLI::App* cmd, bsv::ExperimentConfig& cfg,
                      std::vector<std::string>& tol_flags) {
  cmd->add_option("--n", cfg.n, "photon number n");
  cmd->add_option("--m", cfg.m, "mode count m");
  cmd->add_option("--samples", cfg.samples, "Monte Carlo samples per arm");
  cmd->add_option("--trials", cfg.trials, "independent Haar re-draws");
  cmd->add_option("--seed", cfg.seed, "RNG seed (required for reproducibility)")
      ->required();
  cmd->add_option("--mode", cfg.mode, "exact|surrogate")
      ->check(CLI::IsMember({"exact", "surrogate"}));
  cmd->add_option("--out", cfg.out_path, "report output path");
  cmd->add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tol", tol_flags,
                  "tolerance override, name=value (repeatable)");
}

void apply_tolerances(const std::vector<std::string>& flags,
                      bsv::ExperimentConfig& cfg) {
  for (const std::string& f : flags) {
    const auto eq = f.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--tol", "expected name=value");
    cfg.tolerance_overrides[f.substr(0, eq)] = std::stod(f.substr(eq + 1));
  }
}

void print_summary(const bsv::ExperimentReport& rep) {
  for (const auto& s : rep.statistics) {
    std::printf("  %-36s %.6g", s.name.c_str(), s.value);
    if (s.has_ci) std::printf("  [%.6g, %.6g]", s.ci_lo, s.ci_hi);
    std::printf("\n");
  }
  for (const auto& c : rep.checks) {
    std::printf("  %s %-32s observed %.6g %s %.6g  (%s)\n",
                c.pass ? "[PASS]" : "[FAIL]", c.name.c_str(), c.observed,
                c.comparator.c_str(), c.threshold, c.tolerance.c_str());
  }
  for (const auto& note : rep.notes) std::printf("  note: %s\n", note.c_str());
  std::printf("  wall-clock: %.2fs\n", rep.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bsv: samplers and statistical checks for linear-optical output "
      "distributions"};
  app.require_subcommand(1);

  struct SubcommandState {
    bsv::ExperimentConfig cfg;
    std::vector<std::string> tol_flags;
  };
  std::vector<std::pair<CLI::App*, SubcommandState*>> subs;

  auto make_cmd = [&](const std::string& name, const std::string& desc) {
    auto* state = new SubcommandState;
    state->cfg.experiment = name;
    CLI::App* cmd = app.add_subcommand(name, desc);
    add_common_flags(cmd, state->cfg, state->tol_flags);
    subs.emplace_back(cmd, state);
    return std::make_pair(cmd, state);
  };

  make_cmd("pdf", "density histograms of |Per|^2/n! and |Det|^2/n!");
  make_cmd("deviation", "absolute-deviation statistics of |Per|^2/n!");
  make_cmd("tv", "exact total variation of the boson law from uniform");
  make_cmd("distinguish", "row-norm estimator fractions across sampler arms");
  auto [verify_cmd, verify_state] =
      make_cmd("verify", "amplified permanent-verifier acceptance rates");
  verify_cmd->add_option("--k", verify_state->cfg.verifier_k,
                         "samples per verifier call");
  auto [sample_cmd, sample_state] =
      make_cmd("sample", "raw sampler batches as JSON lines");
  sample_cmd
      ->add_option("--kind", sample_state->cfg.kind,
                   "boson-exact|fermion|mockup-classical|mockup-rownorm|"
                   "uniform|lossy-boson")
      ->check(CLI::IsMember({"boson-exact", "fermion", "mockup-classical",
                             "mockup-rownorm", "uniform", "lossy-boson"}));
  sample_cmd->add_option("--loss", sample_state->cfg.loss,
                         "per-photon loss probability (lossy-boson)");
  sample_cmd->add_option("--space", sample_state->cfg.space,
                         "outcome space for the uniform kind")
      ->check(CLI::IsMember({"full", "collision-free"}));
  sample_cmd->add_option("--matrix", sample_state->cfg.matrix_path,
                         "load the interferometer matrix from JSON");
  make_cmd("fermion", "fermion sampler validation and lognormal convergence");

  CLI11_PARSE(app, argc, argv);

  for (auto& [cmd, state] : subs) {
    if (!cmd->parsed()) continue;
    try {
      apply_tolerances(state->tol_flags, state->cfg);
      const auto t0 = std::chrono::steady_clock::now();
      bsv::ExperimentReport rep = bsv::run_experiment(state->cfg);
      rep.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      bsv::write_report_file(rep);
      std::printf("%s\n", rep.config.experiment.c_str());
      print_summary(rep);
      if (!rep.config.out_path.empty())
        std::printf("  report: %s\n", rep.config.out_path.c_str());
      return rep.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
