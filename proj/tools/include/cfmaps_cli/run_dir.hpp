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

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace cfmaps::cli {

/// A fresh directory `<root>/<command>-<UTC timestamp>[-n]` plus the
/// reproducibility manifest written into it.
class RunDirectory {
 public:
  RunDirectory(const std::filesystem::path& root, const std::string& command);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

  /// Records an input file with its SHA-256 digest. Thread-safe.
  void add_input(const std::string& role, const std::filesystem::path& file);
  /// Records an output file name relative to the run directory. Thread-safe.
  void add_output(const std::string& name);
  void add_warning(const std::string& code, const std::string& message);

  /// manifest.json: command, argv, config, input hashes, outputs, versions.
  void write_manifest(const nlohmann::json& config, const std::vector<std::string>& argv,
                      const nlohmann::json& extra = nlohmann::json::object()) const;

 private:
  std::filesystem::path path_;
  std::string command_;
  std::string started_;
  mutable std::mutex mutex_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json warnings_ = nlohmann::json::array();
};

std::string utc_timestamp(bool compact);

}  // namespace cfmaps::cli
