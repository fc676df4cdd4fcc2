// Copyright 2026 The cfmaps Authors.
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

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfmaps::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitSolver = 4 };

/// Bad configuration: unknown key, wrong type, out-of-range value, missing input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be used (unreadable file, malformed map).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduleConfig {
  int k_start = 4;
  int k_end = 50;
  int step = 1;
  int inner = 10;
};

struct TransferConfig {
  std::string field = "random";  ///< random, coordinate-x, coordinate-y, coordinate-z
  std::vector<std::string> methods = {"complex", "hodge", "lsq"};
  std::vector<std::string> noise_kinds = {"random"};
  std::vector<double> levels = {0.0};
  std::vector<int> k_values;  ///< empty: {k}
};

struct RunConfig {
  std::string name;
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path mesh;
  std::filesystem::path ground_truth;
  std::filesystem::path symmetry;
  std::filesystem::path initial_map;
  std::filesystem::path map;
  std::filesystem::path dataset;
  int k = 50;
  int k_complex = 0;  ///< 0: same as k
  std::uint64_t seed = 0;
  std::filesystem::path output = "cfmaps-runs";
  std::filesystem::path cache_dir;  ///< empty: CFMAPS_CACHE_DIR or the temp directory
  bool no_cache = false;
  int threads = 0;  ///< 0: logical cores

  int descriptor_count = 50;
  double descriptor_variance = 6.0;
  double weight_descriptor = 1.0;
  double weight_commutativity = 1.0;
  double weight_laplacian = 1e-2;
  int icp_iterations = 0;
  std::string q_solver = "procrustes";  ///< procrustes or lsq

  std::string algo = "czo";
  bool use_q_step = true;
  ScheduleConfig schedule;

  TransferConfig transfer;

  std::string shape = "blob";  ///< synth: sphere, bumpy, blob
  int level = 3;
};

/// Overwrites fields present in `j`. Unknown keys and type mismatches throw
/// ConfigError. Relative paths are resolved against `base`.
void apply_json(RunConfig& config, const nlohmann::json& j, const std::filesystem::path& base);

RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

/// Range and consistency checks shared by every subcommand.
void validate(const RunConfig& config);

int effective_k_complex(const RunConfig& config);
int effective_threads(const RunConfig& config);

/// Top-level and nested key names accepted by apply_json.
std::vector<std::string> accepted_keys();

}  // namespace cfmaps::cli
