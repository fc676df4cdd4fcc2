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

#include "cfmaps_cli/dataset.hpp"

#include "cfmaps_cli/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace cfmaps::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const json& j, const std::string& key, const fs::path& base) {
  if (!j.is_string()) throw ConfigError("dataset key '" + key + "' must be a string");
  fs::path p = j.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (p.empty()) return {};
  std::error_code ec;
  fs::path rel = fs::relative(p, base, ec);
  return ec || rel.empty() ? p.string() : rel.string();
}

}  // namespace

DatasetManifest load_dataset_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("dataset manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("dataset manifest must be a JSON object");
  const fs::path base = path.parent_path();
  DatasetManifest m;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      if (!value.is_string()) throw ConfigError("dataset key 'name' must be a string");
      m.name = value.get<std::string>();
    } else if (key != "pairs") {
      throw ConfigError("unknown dataset key '" + key + "'");
    }
  }
  if (!j.contains("pairs") || !j["pairs"].is_array()) {
    throw ConfigError("dataset manifest needs a 'pairs' array");
  }
  std::set<std::string> names;
  for (const auto& entry : j["pairs"]) {
    if (!entry.is_object()) throw ConfigError("dataset pair must be an object");
    DatasetPair p;
    for (const auto& [key, value] : entry.items()) {
      if (key == "name") {
        if (!value.is_string()) throw ConfigError("dataset key 'name' must be a string");
        p.name = value.get<std::string>();
      } else if (key == "source") {
        p.source = resolve(value, key, base);
      } else if (key == "target") {
        p.target = resolve(value, key, base);
      } else if (key == "ground_truth") {
        p.ground_truth = resolve(value, key, base);
      } else if (key == "symmetry") {
        p.symmetry = resolve(value, key, base);
      } else {
        throw ConfigError("unknown dataset pair key '" + key + "'");
      }
    }
    if (p.source.empty() || p.target.empty() || p.ground_truth.empty()) {
      throw ConfigError("dataset pair needs source, target and ground_truth");
    }
    if (p.name.empty()) p.name = p.source.stem().string() + "-" + p.target.stem().string();
    if (!names.insert(p.name).second) throw ConfigError("duplicate dataset pair '" + p.name + "'");
    m.pairs.push_back(std::move(p));
  }
  return m;
}

void save_dataset_manifest(const fs::path& path, const DatasetManifest& m) {
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  json j;
  j["name"] = m.name;
  j["pairs"] = json::array();
  for (const auto& p : m.pairs) {
    json e = {{"name", p.name},
              {"source", relative_to(p.source, base)},
              {"target", relative_to(p.target, base)},
              {"ground_truth", relative_to(p.ground_truth, base)}};
    if (!p.symmetry.empty()) e["symmetry"] = relative_to(p.symmetry, base);
    j["pairs"].push_back(e);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace cfmaps::cli
