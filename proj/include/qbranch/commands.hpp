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

#pragma once

#include <string>
#include <vector>

#include "qbranch/scenario.hpp"

namespace qbranch {

struct Artifact {
  std::string name;  // file name, e.g. "states.csv"
  std::string content;
};

struct CommandReport {
  std::string command;
  std::string json;  // pretty-printed, newline-terminated
  std::vector<Artifact> artifacts;
};

/// Command names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one of simulate, steer, chain-search, recurrence, reversibility,
/// grid-diagnostic. Library errors propagate, except in reversibility,
/// which records them per phase. Output is a deterministic function of the
/// scenario.
CommandReport run_command(const Scenario& scenario, const std::string& command);

}  // namespace qbranch
