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

#include "test_support.hpp"

#include <cfmaps/conversion.hpp>
#include <cfmaps/evaluation.hpp>
#include <cfmaps/hash.hpp>
#include <cfmaps/matrix_io.hpp>
#include <cfmaps/mesh_io.hpp>
#include <cfmaps_cli/commands.hpp>
#include <cfmaps_cli/config.hpp>
#include <cfmaps_cli/dataset.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cfmaps::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out, err;
  fs::path run;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r{run_cli(args, out, err), out.str(), err.str(), {}};
  const std::string tag = "run directory: ";
  if (const auto at = r.out.rfind(tag); at != std::string::npos) {
    std::string p = r.out.substr(at + tag.size());
    r.run = p.substr(0, p.find('\n'));
  }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

/// One synthetic blob pair and one bumpy pair shared by every test.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = test::scratch_dir("cli");
    cache_ = root_ / "cache";
    const Result blob = run({"synth", "--shape", "blob", "--level", "2", "--seed", "3", "-o",
                             (root_ / "synth").string()});
    ASSERT_EQ(blob.code, 0) << blob.err;
    blob_ = blob.run;
    const Result bumpy = run({"synth", "--shape", "bumpy", "--level", "2", "--seed", "5", "-o",
                              (root_ / "synth").string()});
    ASSERT_EQ(bumpy.code, 0) << bumpy.err;
    bumpy_ = bumpy.run;
  }

  std::vector<std::string> common(const std::string& out) const {
    return {"-o", (root_ / out).string(), "--cache-dir", cache_.string()};
  }

  std::vector<std::string> with(std::vector<std::string> a, const std::string& out) const {
    for (auto& s : common(out)) a.push_back(s);
    return a;
  }

  static fs::path root_, cache_, blob_, bumpy_;
};

fs::path CliTest::root_, CliTest::cache_, CliTest::blob_, CliTest::bumpy_;

TEST_F(CliTest, SynthLayout) {
  for (const char* f : {"source.off", "target.off", "ground_truth.map", "symmetry.map",
                        "dataset.json", "manifest.json", "config.json"}) {
    EXPECT_TRUE(fs::exists(blob_ / f)) << f;
  }
  EXPECT_FALSE(fs::exists(bumpy_ / "symmetry.map"));
  const DatasetManifest d = load_dataset_manifest(blob_ / "dataset.json");
  ASSERT_EQ(d.pairs.size(), 1U);
  EXPECT_EQ(fs::canonical(d.pairs[0].source), fs::canonical(blob_ / "source.off"));
  const TriMesh src = load_mesh(blob_ / "source.off"), tgt = load_mesh(blob_ / "target.off");
  const PointMap gt = load_pointmap(blob_ / "ground_truth.map");
  ASSERT_EQ(static_cast<int>(gt.size()), src.num_vertices());
  // A rigid copy: edge lengths agree under the ground-truth map.
  for (const auto& e : src.edges()) {
    EXPECT_NEAR((src.position(e[0]) - src.position(e[1])).norm(),
                (tgt.position(gt[e[0]]) - tgt.position(gt[e[1]])).norm(), 1e-9);
  }
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({"basis", "--bogus"}).code, kExitConfig);
  const std::string mesh = (blob_ / "target.off").string();
  EXPECT_EQ(run(with({"basis", "--mesh", mesh, "--k", "0"}, "bad")).code, kExitConfig);
  EXPECT_EQ(run(with({"basis", "--mesh", mesh, "--k", "5000"}, "bad")).code, kExitConfig);
  EXPECT_EQ(run(with({"basis"}, "bad")).code, kExitConfig);
  EXPECT_EQ(run(with({"basis", "--mesh", (root_ / "nope.off").string()}, "bad")).code, kExitData);
  write(root_ / "broken.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n");
  EXPECT_EQ(run(with({"basis", "--mesh", (root_ / "broken.off").string()}, "bad")).code,
            kExitData);
  EXPECT_EQ(run(with({"refine", "--source", (blob_ / "source.off").string(), "--target", mesh,
                      "--algo", "magic"},
                     "bad"))
                .code,
            kExitConfig);
  // A ground-truth map of the wrong length is a data error.
  write(root_ / "short.map", "0\n1\n");
  EXPECT_EQ(run(with({"match", "--source", (blob_ / "source.off").string(), "--target", mesh,
                      "--ground-truth", (root_ / "short.map").string(), "--k", "10"},
                     "bad"))
                .code,
            kExitData);
  for (const char* cmd : {"match", "refine", "transfer", "eval"}) {
    EXPECT_EQ(run(with({cmd, "--k", "-1"}, "bad")).code, kExitConfig) << cmd;
  }
}

TEST_F(CliTest, ConfigValidation) {
  write(root_ / "unknown.json", R"({"k": 10, "colour": "red"})");
  write(root_ / "type.json", R"({"k": "ten"})");
  write(root_ / "nested.json", R"({"schedule": {"k_start": 4, "warp": 1}})");
  write(root_ / "syntax.json", R"({"k": )");
  for (const char* f : {"unknown.json", "type.json", "nested.json", "syntax.json"}) {
    const Result r = run(with({"basis", "--config", (root_ / f).string()}, "bad"));
    EXPECT_EQ(r.code, kExitConfig) << f << ": " << r.err;
  }
  EXPECT_THROW(load_config(root_ / "unknown.json"), ConfigError);
}

TEST_F(CliTest, SchemaListsEveryAcceptedKey) {
  const json schema = read_json(fs::path(CFMAPS_SCHEMA_PATH));
  std::set<std::string> keys;
  for (const auto& [k, v] : schema["properties"].items()) {
    if (v.contains("properties")) {
      for (const auto& [sub, unused] : v["properties"].items()) keys.insert(k + "." + sub);
    } else {
      keys.insert(k);
    }
  }
  const auto accepted = accepted_keys();
  EXPECT_EQ(keys, std::set<std::string>(accepted.begin(), accepted.end()));
  EXPECT_FALSE(schema.value("additionalProperties", true));
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const std::string mesh = (blob_ / "target.off").string();
  write(root_ / "k10.json", json{{"mesh", mesh}, {"k", 10}, {"k_complex", 6}}.dump());
  const Result r = run(with({"basis", "--config", (root_ / "k10.json").string(), "--k", "7"},
                            "override"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(r.run / "eigenvalues.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 7);
  const json m = read_json(r.run / "manifest.json");
  EXPECT_EQ(m["config"]["k"], 7);
  EXPECT_EQ(m["config"]["k_complex"], 6);
}

TEST_F(CliTest, BasisCacheLifecycle) {
  const std::string mesh = (bumpy_ / "target.off").string();
  const fs::path cache = root_ / "cache-lifecycle";
  auto basis = [&](std::vector<std::string> extra, const std::string& k = "12") {
    std::vector<std::string> a{"basis", "--mesh", mesh, "--k", k, "-o",
                               (root_ / "basis").string(), "--cache-dir", cache.string()};
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  const Result first = basis({});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("cache miss"), std::string::npos);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cache)) files.push_back(e.path());
  ASSERT_EQ(files.size(), 1U);
  const auto stamp = fs::last_write_time(files[0]);
  const Result second = basis({});
  EXPECT_NE(second.out.find("cache hit"), std::string::npos);
  EXPECT_EQ(fs::last_write_time(files[0]), stamp);
  EXPECT_EQ(slurp(first.run / "eigenvalues.csv"), slurp(second.run / "eigenvalues.csv"));
  const Result smaller = basis({}, "5");
  EXPECT_NE(smaller.out.find("cache hit"), std::string::npos);
  EXPECT_NE(basis({"--no-cache"}).out.find("cache disabled"), std::string::npos);

  // Corrupt the cache: the run warns, recomputes and still succeeds.
  {
    std::fstream f(files[0], std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    f.put('\x55');
  }
  const Result healed = basis({});
  EXPECT_EQ(healed.code, 0);
  EXPECT_NE(healed.err.find("warning["), std::string::npos);
  EXPECT_EQ(slurp(first.run / "eigenvalues.csv"), slurp(healed.run / "eigenvalues.csv"));
  EXPECT_FALSE(read_json(healed.run / "manifest.json")["warnings"].empty());
}

TEST_F(CliTest, CacheDirectoryFromEnvironment) {
  const fs::path env_cache = root_ / "env-cache";
  ::setenv("CFMAPS_CACHE_DIR", env_cache.c_str(), 1);
  const Result r = run({"basis", "--mesh", (bumpy_ / "target.off").string(), "--k", "6", "-o",
                        (root_ / "env").string()});
  ::unsetenv("CFMAPS_CACHE_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(env_cache));
  EXPECT_FALSE(fs::is_empty(env_cache));
}

TEST_F(CliTest, MatchIdentityPair) {
  const std::string mesh = (bumpy_ / "target.off").string();
  const Result r = run(with({"match", "--source", mesh, "--target", mesh, "--k", "20"}, "match"));
  ASSERT_EQ(r.code, 0) << r.err;
  const PointMap id = test::identity_map(load_mesh(mesh).num_vertices());
  EXPECT_EQ(load_pointmap(r.run / "map_fmap.map"), id);
  EXPECT_EQ(load_pointmap(r.run / "map_q.map"), id);
  const MatrixXd C = load_matrix_csv(r.run / "C.csv");
  EXPECT_LT((C - MatrixXd::Identity(20, 20)).norm(), 1e-2);
}

TEST_F(CliTest, MatchIsDeterministicAndReproducible) {
  auto args = with({"match", "--source", (blob_ / "source.off").string(), "--target",
                    (blob_ / "target.off").string(), "--ground-truth",
                    (blob_ / "ground_truth.map").string(), "--k", "20", "--icp", "2"},
                   "match");
  const Result a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"C.csv", "Q.csv", "map_fmap.map", "map_q.map", "accuracy.csv"}) {
    EXPECT_EQ(slurp(a.run / f), slurp(b.run / f)) << f;
  }
  // The manifest hashes every input and the stored config replays the run.
  const json m = read_json(a.run / "manifest.json");
  ASSERT_EQ(m["inputs"].size(), 3U);
  for (const auto& in : m["inputs"]) {
    EXPECT_EQ(in["sha256"], sha256_file(in["path"].get<std::string>()));
  }
  EXPECT_TRUE(m["versions"].contains("eigen"));
  EXPECT_EQ(m["command"], "match");
  const Result replay = run({"match", "--config", (a.run / "config.json").string(), "-o",
                             (root_ / "replay").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  for (const char* f : {"C.csv", "Q.csv", "map_fmap.map", "map_q.map"}) {
    EXPECT_EQ(slurp(a.run / f), slurp(replay.run / f)) << f;
  }
}

TEST_F(CliTest, MatchAccuracyTableRecomputes) {
  const Result r = run(with({"match", "--source", (blob_ / "source.off").string(), "--target",
                             (blob_ / "target.off").string(), "--ground-truth",
                             (blob_ / "ground_truth.map").string(), "--k", "20"},
                            "match-acc"));
  ASSERT_EQ(r.code, 0) << r.err;
  const TriMesh target = load_mesh(blob_ / "target.off");
  const PointMap gt = load_pointmap(blob_ / "ground_truth.map");
  const double fmap = geodesic_error(load_pointmap(r.run / "map_fmap.map"), gt, target).mean;
  const double q = geodesic_error(load_pointmap(r.run / "map_q.map"), gt, target).mean;
  std::istringstream csv(slurp(r.run / "accuracy.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "pair,method,mean,median,min");
  std::map<std::string, double> means;
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string pair, method, mean;
    std::getline(row, pair, ',');
    std::getline(row, method, ',');
    std::getline(row, mean, ',');
    means[method] = std::stod(mean);
  }
  EXPECT_NEAR(means.at("fmap"), fmap, 1e-9);
  EXPECT_NEAR(means.at("fmap+Q"), q, 1e-9);
  const std::string md = slurp(r.run / "accuracy.md");
  EXPECT_NE(md.find("| Method | Pairs | Avg. | Median | Min |"), std::string::npos);
  EXPECT_NE(md.find("| fmap+Q | 1 |"), std::string::npos);
}

TEST_F(CliTest, RefineWritesLog) {
  const Result r = run(with({"refine", "--source", (blob_ / "source.off").string(), "--target",
                             (blob_ / "target.off").string(), "--ground-truth",
                             (blob_ / "ground_truth.map").string(), "--k-start", "4", "--k-end",
                             "12", "--step", "4", "--inner", "2", "--algo", "cbzo"},
                            "refine"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json log = read_json(r.run / "refine_log.json");
  EXPECT_EQ(log["algo"], "cbzo");
  EXPECT_EQ(log["steps"].size(), 6U);
  EXPECT_TRUE(log.contains("geodesic_error"));
  EXPECT_TRUE(fs::exists(r.run / "map_mn.map"));
  EXPECT_TRUE(fs::exists(r.run / "map_nm.map"));
  const Result again = run(with({"refine", "--config", (r.run / "config.json").string()}, "refine"));
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(slurp(r.run / "map_mn.map"), slurp(again.run / "map_mn.map"));
}

TEST_F(CliTest, TransferWritesBenchmarkCsv) {
  const Result r = run(with({"transfer", "--source", (blob_ / "source.off").string(), "--target",
                             (blob_ / "target.off").string(), "--ground-truth",
                             (blob_ / "ground_truth.map").string(), "--symmetry",
                             (blob_ / "symmetry.map").string(), "--field", "coordinate-x",
                             "--noise", "symmetric", "--levels", "0.5", "--k-values", "10,20"},
                            "transfer"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(r.run / "transfer.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "pair,method,noise_kind,level,k,error");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 3 * 2);
  const Result nosym = run(with({"transfer", "--source", (blob_ / "source.off").string(),
                                 "--target", (blob_ / "target.off").string(), "--ground-truth",
                                 (blob_ / "ground_truth.map").string(), "--noise", "symmetric"},
                                "transfer"));
  EXPECT_EQ(nosym.code, kExitConfig);
}

TEST_F(CliTest, EvalSingleAndDataset) {
  const std::string gt = (blob_ / "ground_truth.map").string();
  const Result single = run(with({"eval", "--map", gt, "--ground-truth", gt, "--target",
                                  (blob_ / "target.off").string(), "--symmetry",
                                  (blob_ / "symmetry.map").string()},
                                 "eval"));
  ASSERT_EQ(single.code, 0) << single.err;
  const json report = read_json(single.run / "report.json");
  EXPECT_EQ(report["mean"], 0.0);
  EXPECT_EQ(report["flip_rate"], 0.0);
  EXPECT_TRUE(fs::exists(single.run / "curves.csv"));

  const Result ds = run(with({"eval", "--dataset", (blob_ / "dataset.json").string(), "--k", "20",
                              "-j", "2"},
                             "eval"));
  ASSERT_EQ(ds.code, 0) << ds.err;
  for (const char* f : {"accuracy.csv", "accuracy.md", "curves.csv", "flip_rates.json"}) {
    EXPECT_TRUE(fs::exists(ds.run / f)) << f;
  }
}

}  // namespace
}  // namespace cfmaps::cli
