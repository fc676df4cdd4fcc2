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

#include "cfmaps/mesh.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cfmaps {

/// Shortest paths along mesh edges, weighted by edge length.
class GeodesicGraph {
 public:
  explicit GeodesicGraph(const TriMesh& mesh);

  int size() const { return static_cast<int>(offsets_.size()) - 1; }
  /// Distances from `source` to every vertex; infinity when unreachable.
  std::vector<double> distances_from(int source) const;
  double distance(int a, int b) const;
  /// Distances for (from, to) pairs, one Dijkstra per distinct `from` that
  /// stops once all of its targets are settled.
  std::vector<double> pair_distances(const std::vector<std::pair<int, int>>& pairs) const;

 private:
  std::vector<int> offsets_;
  std::vector<int> targets_;
  std::vector<double> weights_;
};

struct GeodesicErrorReport {
  std::vector<double> errors;  ///< per source vertex, normalized by sqrt(area)
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> thresholds;
  std::vector<double> curve;  ///< fraction of errors <= threshold

  double coverage(double threshold) const;
};

inline constexpr int kCurveSamples = 100;
inline constexpr double kCurveMaxThreshold = 0.25;

GeodesicErrorReport geodesic_error(const PointMap& map, const PointMap& ground_truth,
                                   const TriMesh& target);
GeodesicErrorReport geodesic_error(const PointMap& map, const PointMap& ground_truth,
                                   const TriMesh& target, const GeodesicGraph& graph);

GeodesicErrorReport make_report(std::vector<double> errors);

/// Fraction of vertices mapped strictly closer to the reflected ground truth
/// symmetry[gt(i)] than to gt(i).
double flip_rate(const PointMap& map, const PointMap& ground_truth,
                 const std::vector<int>& symmetry, const GeodesicGraph& graph);

struct AccuracyRun {
  std::string pair;
  std::string method;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
};

AccuracyRun make_run(std::string pair, std::string method, const GeodesicErrorReport& report);

struct MethodSummary {
  std::string method;
  int pairs = 0;
  double avg = 0.0;     ///< mean of per-pair means
  double median = 0.0;  ///< mean of per-pair medians
  double min = 0.0;     ///< mean of per-pair minima
};

/// Summaries in order of first appearance of each method.
std::vector<MethodSummary> summarize(const std::vector<AccuracyRun>& runs);

/// Per-run CSV: pair,method,mean,median,min.
void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRun>& runs);
/// Per-method Markdown table: Method | Pairs | Avg. | Median | Min.
void write_accuracy_markdown(std::ostream& out, const std::vector<AccuracyRun>& runs);

}  // namespace cfmaps
