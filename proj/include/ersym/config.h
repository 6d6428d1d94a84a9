// Copyright 2026 The ersym Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration files: one `key = value` per line, `#` starts a
// comment, sections are dotted key prefixes (sp., op., discovery.). The
// first entry must be `version = 1`. Unknown keys are rejected.
//
//   version = 1
//   env = catdog
//   population = 5
//   sp.epsilon = 0.3
//   discovery.temperature = 1/2.667
//   agent_seeds = 11, 12, 13, 14, 15
//
// Numbers accept an `a/b` fraction form.

#ifndef ERSYM_CONFIG_H_
#define ERSYM_CONFIG_H_

#include <string>
#include <vector>

#include "ersym/harness.h"

namespace ersym {

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
  std::string env;
  PopulationConfig population;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Syntax only: splits lines, checks the version entry and duplicate keys.
std::vector<ConfigEntry> ParseConfigEntries(const std::string& text);

// Defaults tuned per bundled environment.
ExperimentConfig PresetConfig(const std::string& env);

// Applies entries on top of cfg. `env` entries are skipped; choose the
// preset first.
void ApplyConfigEntries(const std::vector<ConfigEntry>& entries, ExperimentConfig& cfg);

// Reads a config file. The environment is env_override if non-empty, else
// the file's `env` entry; the preset for it is loaded before the entries.
ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      const std::string& env_override = "");
ExperimentConfig ParseExperimentConfig(const std::string& text,
                                       const std::string& env_override = "");

// Every key, in a form ParseExperimentConfig reads back to the same config.
std::string ConfigToText(const ExperimentConfig& cfg);

}  // namespace ersym

#endif  // ERSYM_CONFIG_H_
