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

#include "cfmaps_cli/config.hpp"
#include "cfmaps_cli/run_dir.hpp"

#include <cfmaps/evaluation.hpp>
#include <cfmaps/shape_data.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cfmaps::cli {

struct Invocation {
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;
};

/// Loads a mesh and its bases through the cache (unless disabled) and records
/// the mesh as a run input.
ShapeData load_shape(const std::filesystem::path& path, int k, int k_complex,
                     const RunConfig& config, RunDirectory* run, bool* cache_hit = nullptr);

/// Reads a point map and checks it against the source and target sizes.
PointMap load_checked_map(const std::filesystem::path& path, int source_size, int target_size,
                          RunDirectory* run, const std::string& role);

struct MatchOutput {
  MatrixXd C;  ///< target coefficients -> source coefficients
  MatrixXc Q;
  PointMap map_fmap;  ///< source vertex -> target vertex
  PointMap map_q;
};

/// WKS descriptors, least-squares C, optional spectral ICP, then Q and both
/// point maps.
MatchOutput match_pipeline(const ShapeData& source, const ShapeData& target,
                           const RunConfig& config);

std::string pair_name(const RunConfig& config);

void cmd_basis(const RunConfig& config, RunDirectory& run, const Invocation& io);
void cmd_match(const RunConfig& config, RunDirectory& run, const Invocation& io);
void cmd_refine(const RunConfig& config, RunDirectory& run, const Invocation& io);
void cmd_transfer(const RunConfig& config, RunDirectory& run, const Invocation& io);
void cmd_eval(const RunConfig& config, RunDirectory& run, const Invocation& io);
void cmd_synth(const RunConfig& config, RunDirectory& run, const Invocation& io);

/// Parses arguments (without the program name), runs the subcommand and maps
/// failures to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfmaps::cli
