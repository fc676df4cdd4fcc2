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

#include "cfmaps_cli/run_dir.hpp"

#include "cfmaps_cli/config.hpp"

#include <cfmaps/hash.hpp>

#include <Eigen/Core>

#include <chrono>
#include <ctime>
#include <fstream>

#ifndef CFMAPS_VERSION
#define CFMAPS_VERSION "unknown"
#endif

namespace cfmaps::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp(bool compact) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunDirectory::RunDirectory(const fs::path& root, const std::string& command)
    : command_(command), started_(utc_timestamp(false)) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw ConfigError("cannot create output directory " + root.string() + ": " + ec.message());
  const std::string stem = command + "-" + utc_timestamp(true);
  for (int n = 0;; ++n) {
    fs::path candidate = root / (n == 0 ? stem : stem + "-" + std::to_string(n));
    if (fs::create_directory(candidate, ec)) {
      path_ = candidate;
      return;
    }
    if (ec) throw ConfigError("cannot create run directory " + candidate.string());
  }
}

void RunDirectory::add_input(const std::string& role, const fs::path& file) {
  std::string digest;
  try {
    digest = sha256_file(file);
  } catch (const std::exception& e) {
    throw DataError("cannot read input " + file.string() + ": " + e.what());
  }
  std::lock_guard lock(mutex_);
  inputs_.push_back({{"role", role}, {"path", fs::absolute(file).string()}, {"sha256", digest}});
}

void RunDirectory::add_output(const std::string& name) {
  std::lock_guard lock(mutex_);
  outputs_.push_back(name);
}

void RunDirectory::add_warning(const std::string& code, const std::string& message) {
  std::lock_guard lock(mutex_);
  warnings_.push_back({{"code", code}, {"message", message}});
}

void RunDirectory::write_manifest(const json& config, const std::vector<std::string>& argv,
                                  const json& extra) const {
  json m;
  {
    std::lock_guard lock(mutex_);
    m["command"] = command_;
    m["argv"] = argv;
    m["started"] = started_;
    m["finished"] = utc_timestamp(false);
    m["config"] = config;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["warnings"] = warnings_;
  }
  m["versions"] = {{"cfmaps", CFMAPS_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(path_ / "manifest.json");
  out << m.dump(2) << '\n';
  // The config alone reproduces the run: cfmaps <command> --config config.json
  std::ofstream cfg(path_ / "config.json");
  cfg << config.dump(2) << '\n';
}

}  // namespace cfmaps::cli
