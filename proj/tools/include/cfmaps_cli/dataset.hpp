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

#include <filesystem>
#include <string>
#include <vector>

namespace cfmaps::cli {

struct DatasetPair {
  std::string name;
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path ground_truth;  ///< source vertex -> target vertex
  std::filesystem::path symmetry;      ///< optional, on the target
};

struct DatasetManifest {
  std::string name;
  std::vector<DatasetPair> pairs;
};

/// JSON manifest:
///   {"name": "faust", "pairs": [{"name": "...", "source": "a.off",
///    "target": "b.off", "ground_truth": "a_b.map", "symmetry": "b.sym"}]}
/// Relative paths are resolved against the manifest's directory. Unknown keys
/// throw ConfigError.
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);

void save_dataset_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace cfmaps::cli
