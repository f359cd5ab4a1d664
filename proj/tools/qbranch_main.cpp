// Copyright 2026 The qbranch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through the C API.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbranch/qbranch.h"

namespace {

struct Flags {
  std::string scenario;
  std::optional<std::string> x0;
  std::optional<std::string> target;
  std::optional<int> steps;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  bool quiet = false;
};

int fail(qb_status st) {
  std::cerr << "qbranch: " << qb_status_string(st) << ": " << qb_last_error() << "\n";
  return static_cast<int>(st);
}

bool write_file(const std::filesystem::path& p, const char* data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
  return static_cast<bool>(out);
}

int run(const std::string& command, const Flags& f) {
  qb_scenario* sc = nullptr;
  qb_status st = qb_scenario_load_file(f.scenario.c_str(), &sc);
  if (st != QB_OK) return fail(st);
  std::unique_ptr<qb_scenario, decltype(&qb_scenario_free)> holder(sc, &qb_scenario_free);

  if (f.seed && (st = qb_scenario_set_seed(sc, *f.seed)) != QB_OK) return fail(st);
  if (f.steps && (st = qb_scenario_set_steps(sc, *f.steps)) != QB_OK) return fail(st);
  if (f.epsilon && (st = qb_scenario_set_epsilon(sc, *f.epsilon)) != QB_OK) return fail(st);
  if (f.x0 && (st = qb_scenario_set_x0(sc, f.x0->c_str())) != QB_OK) return fail(st);
  if (f.target && (st = qb_scenario_set_target(sc, f.target->c_str())) != QB_OK) return fail(st);

  qb_report* rep = nullptr;
  st = qb_run(sc, command.c_str(), &rep);
  if (st != QB_OK) return fail(st);
  std::unique_ptr<qb_report, decltype(&qb_report_free)> report(rep, &qb_report_free);

  const std::filesystem::path dir = f.output ? *f.output : qb_scenario_output_dir(sc);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "qbranch: cannot create " << dir << ": " << ec.message() << "\n";
    return QB_ERR_INTERNAL;
  }
  if (qb_scenario_wants_json(sc)) {
    const auto p = dir / (command + ".json");
    if (!write_file(p, qb_report_json(rep))) {
      std::cerr << "qbranch: cannot write " << p << "\n";
      return QB_ERR_INTERNAL;
    }
    if (!f.quiet) std::cout << p.string() << "\n";
  }
  if (qb_scenario_wants_csv(sc)) {
    for (size_t i = 0; i < qb_report_artifact_count(rep); ++i) {
      const auto p = dir / qb_report_artifact_name(rep, i);
      if (!write_file(p, qb_report_artifact_data(rep, i))) {
        std::cerr << "qbranch: cannot write " << p << "\n";
        return QB_ERR_INTERNAL;
      }
      if (!f.quiet) std::cout << p.string() << "\n";
    }
  }
  return QB_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Realized collapse dynamics, steering and chain recurrence experiments"};
  app.set_version_flag("--version", qb_version());
  app.require_subcommand(1);

  Flags f;
  const char* commands[] = {"simulate", "steer", "chain-search", "recurrence", "reversibility", "grid-diagnostic"};
  std::string chosen;
  for (const char* name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
    sub->add_option("--x0", f.x0, "Initial state literal, e.g. 0 or [[1,0],[0,0]]");
    sub->add_option("--target", f.target, "Target state literal");
    sub->add_option("--steps", f.steps, "Number of steps")->check(CLI::NonNegativeNumber);
    sub->add_option("--epsilon", f.epsilon, "Chain scale")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Overrides every seed in the scenario");
    sub->add_option("--output", f.output, "Output directory (default: scenario output.directory)");
    sub->add_flag("-q,--quiet", f.quiet, "Do not list written files");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : QB_ERR_CONFIG;
  }
  return run(chosen, f);
}
