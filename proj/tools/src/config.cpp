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

#include "cfmaps_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

namespace cfmaps::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

using Setter = std::function<void(RunConfig&, const json&, const fs::path&)>;

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return j.get<int>();
}

double get_double(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  return j.get<bool>();
}

fs::path get_path(const json& j, const std::string& key, const fs::path& base) {
  fs::path p = get_string(j, key);
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class T>
std::vector<T> get_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& e : j) {
    if constexpr (std::is_same_v<T, int>) {
      out.push_back(get_int(e, key));
    } else if constexpr (std::is_same_v<T, double>) {
      out.push_back(get_double(e, key));
    } else {
      out.push_back(get_string(e, key));
    }
  }
  return out;
}

#define CFM_PATH(field) \
  {#field, [](RunConfig& c, const json& j, const fs::path& b) { c.field = get_path(j, #field, b); }}

const std::map<std::string, Setter>& top_level() {
  static const std::map<std::string, Setter> table = {
      {"name", [](RunConfig& c, const json& j, const fs::path&) { c.name = get_string(j, "name"); }},
      CFM_PATH(source),
      CFM_PATH(target),
      CFM_PATH(mesh),
      CFM_PATH(ground_truth),
      CFM_PATH(symmetry),
      CFM_PATH(initial_map),
      CFM_PATH(map),
      CFM_PATH(dataset),
      CFM_PATH(output),
      CFM_PATH(cache_dir),
      {"k", [](RunConfig& c, const json& j, const fs::path&) { c.k = get_int(j, "k"); }},
      {"k_complex",
       [](RunConfig& c, const json& j, const fs::path&) { c.k_complex = get_int(j, "k_complex"); }},
      {"seed",
       [](RunConfig& c, const json& j, const fs::path&) {
         if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
           throw ConfigError("config key 'seed' must be a non-negative integer");
         }
         c.seed = j.get<std::uint64_t>();
       }},
      {"no_cache",
       [](RunConfig& c, const json& j, const fs::path&) { c.no_cache = get_bool(j, "no_cache"); }},
      {"threads",
       [](RunConfig& c, const json& j, const fs::path&) { c.threads = get_int(j, "threads"); }},
      {"icp_iterations",
       [](RunConfig& c, const json& j, const fs::path&) {
         c.icp_iterations = get_int(j, "icp_iterations");
       }},
      {"q_solver",
       [](RunConfig& c, const json& j, const fs::path&) { c.q_solver = get_string(j, "q_solver"); }},
      {"algo", [](RunConfig& c, const json& j, const fs::path&) { c.algo = get_string(j, "algo"); }},
      {"use_q_step",
       [](RunConfig& c, const json& j, const fs::path&) {
         c.use_q_step = get_bool(j, "use_q_step");
       }},
      {"shape", [](RunConfig& c, const json& j, const fs::path&) { c.shape = get_string(j, "shape"); }},
      {"level", [](RunConfig& c, const json& j, const fs::path&) { c.level = get_int(j, "level"); }},
  };
  return table;
}

#undef CFM_PATH

using Nested = std::map<std::string, std::function<void(RunConfig&, const json&)>>;

const std::map<std::string, Nested>& nested() {
  static const std::map<std::string, Nested> table = {
      {"descriptors",
       {{"count", [](RunConfig& c, const json& j) { c.descriptor_count = get_int(j, "descriptors.count"); }},
        {"variance",
         [](RunConfig& c, const json& j) {
           c.descriptor_variance = get_double(j, "descriptors.variance");
         }}}},
      {"weights",
       {{"descriptor",
         [](RunConfig& c, const json& j) { c.weight_descriptor = get_double(j, "weights.descriptor"); }},
        {"commutativity",
         [](RunConfig& c, const json& j) {
           c.weight_commutativity = get_double(j, "weights.commutativity");
         }},
        {"laplacian",
         [](RunConfig& c, const json& j) { c.weight_laplacian = get_double(j, "weights.laplacian"); }}}},
      {"schedule",
       {{"k_start", [](RunConfig& c, const json& j) { c.schedule.k_start = get_int(j, "schedule.k_start"); }},
        {"k_end", [](RunConfig& c, const json& j) { c.schedule.k_end = get_int(j, "schedule.k_end"); }},
        {"step", [](RunConfig& c, const json& j) { c.schedule.step = get_int(j, "schedule.step"); }},
        {"inner", [](RunConfig& c, const json& j) { c.schedule.inner = get_int(j, "schedule.inner"); }}}},
      {"transfer",
       {{"field", [](RunConfig& c, const json& j) { c.transfer.field = get_string(j, "transfer.field"); }},
        {"methods",
         [](RunConfig& c, const json& j) {
           c.transfer.methods = get_list<std::string>(j, "transfer.methods");
         }},
        {"noise_kinds",
         [](RunConfig& c, const json& j) {
           c.transfer.noise_kinds = get_list<std::string>(j, "transfer.noise_kinds");
         }},
        {"levels",
         [](RunConfig& c, const json& j) { c.transfer.levels = get_list<double>(j, "transfer.levels"); }},
        {"k_values",
         [](RunConfig& c, const json& j) {
           c.transfer.k_values = get_list<int>(j, "transfer.k_values");
         }}}},
  };
  return table;
}

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

void apply_json(RunConfig& config, const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (auto it = top_level().find(key); it != top_level().end()) {
      it->second(config, value, base);
      continue;
    }
    auto nt = nested().find(key);
    if (nt == nested().end()) throw ConfigError("unknown config key '" + key + "'");
    if (!value.is_object()) throw ConfigError("config key '" + key + "' must be an object");
    for (const auto& [sub, sub_value] : value.items()) {
      auto st = nt->second.find(sub);
      if (st == nt->second.end()) {
        throw ConfigError("unknown config key '" + key + "." + sub + "'");
      }
      st->second(config, sub_value);
    }
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig config;
  apply_json(config, j, path.parent_path());
  return config;
}

json to_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["source"] = c.source.string();
  j["target"] = c.target.string();
  j["mesh"] = c.mesh.string();
  j["ground_truth"] = c.ground_truth.string();
  j["symmetry"] = c.symmetry.string();
  j["initial_map"] = c.initial_map.string();
  j["map"] = c.map.string();
  j["dataset"] = c.dataset.string();
  j["k"] = c.k;
  j["k_complex"] = c.k_complex;
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  j["cache_dir"] = c.cache_dir.string();
  j["no_cache"] = c.no_cache;
  j["threads"] = c.threads;
  j["descriptors"] = {{"count", c.descriptor_count}, {"variance", c.descriptor_variance}};
  j["weights"] = {{"descriptor", c.weight_descriptor},
                  {"commutativity", c.weight_commutativity},
                  {"laplacian", c.weight_laplacian}};
  j["icp_iterations"] = c.icp_iterations;
  j["q_solver"] = c.q_solver;
  j["algo"] = c.algo;
  j["use_q_step"] = c.use_q_step;
  j["schedule"] = {{"k_start", c.schedule.k_start},
                   {"k_end", c.schedule.k_end},
                   {"step", c.schedule.step},
                   {"inner", c.schedule.inner}};
  j["transfer"] = {{"field", c.transfer.field},
                   {"methods", c.transfer.methods},
                   {"noise_kinds", c.transfer.noise_kinds},
                   {"levels", c.transfer.levels},
                   {"k_values", c.transfer.k_values}};
  j["shape"] = c.shape;
  j["level"] = c.level;
  return j;
}

void validate(const RunConfig& c) {
  if (c.k < 1) throw ConfigError("k must be positive");
  if (c.k_complex < 0) throw ConfigError("k_complex must be non-negative");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  if (c.descriptor_count < 1) throw ConfigError("descriptors.count must be positive");
  if (!(c.descriptor_variance > 0)) throw ConfigError("descriptors.variance must be positive");
  if (c.weight_descriptor < 0 || c.weight_commutativity < 0 || c.weight_laplacian < 0) {
    throw ConfigError("weights must be non-negative");
  }
  if (c.icp_iterations < 0) throw ConfigError("icp_iterations must be non-negative");
  if (c.q_solver != "procrustes" && c.q_solver != "lsq") {
    throw ConfigError("q_solver must be 'procrustes' or 'lsq'");
  }
  const auto& s = c.schedule;
  if (s.k_start < 1 || s.k_end < s.k_start || s.step < 1 || s.inner < 1) {
    throw ConfigError("schedule needs 1 <= k_start <= k_end, step >= 1 and inner >= 1");
  }
  static const std::vector<std::string> fields = {"random", "coordinate-x", "coordinate-y",
                                                  "coordinate-z"};
  if (!contains(fields, c.transfer.field)) {
    throw ConfigError("transfer.field must be one of random, coordinate-x, coordinate-y, coordinate-z");
  }
  static const std::vector<std::string> methods = {"complex", "hodge", "lsq"};
  if (c.transfer.methods.empty()) throw ConfigError("transfer.methods is empty");
  for (const auto& m : c.transfer.methods) {
    if (!contains(methods, m)) throw ConfigError("unknown transfer method '" + m + "'");
  }
  static const std::vector<std::string> kinds = {"none", "random", "symmetric"};
  for (const auto& k : c.transfer.noise_kinds) {
    if (!contains(kinds, k)) throw ConfigError("unknown noise kind '" + k + "'");
  }
  for (double l : c.transfer.levels) {
    if (!(l >= 0)) throw ConfigError("noise levels must be non-negative");
  }
  for (int k : c.transfer.k_values) {
    if (k < 1) throw ConfigError("transfer.k_values must be positive");
  }
  static const std::vector<std::string> shapes = {"sphere", "bumpy", "blob"};
  if (!contains(shapes, c.shape)) throw ConfigError("shape must be one of sphere, bumpy, blob");
  if (c.level < 0 || c.level > 6) throw ConfigError("level must be in [0, 6]");
}

int effective_k_complex(const RunConfig& c) { return c.k_complex > 0 ? c.k_complex : c.k; }

int effective_threads(const RunConfig& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> accepted_keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : top_level()) out.push_back(k);
  for (const auto& [k, sub] : nested()) {
    for (const auto& [s, v] : sub) out.push_back(k + "." + s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cfmaps::cli
