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

#include "cfmaps/evaluation.hpp"

#include "cfmaps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>

namespace cfmaps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_map(const PointMap& map, int n_target, const char* name) {
  for (int v : map) {
    if (v < 0 || v >= n_target) throw InvalidArgument(std::string(name) + " has an invalid entry");
  }
}

}  // namespace

GeodesicGraph::GeodesicGraph(const TriMesh& mesh) {
  const int n = mesh.num_vertices();
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + mesh.degree(v);
  targets_.reserve(offsets_[n]);
  weights_.reserve(offsets_[n]);
  for (int v = 0; v < n; ++v) {
    for (int w : mesh.neighbors(v)) {
      targets_.push_back(w);
      weights_.push_back((mesh.position(v) - mesh.position(w)).norm());
    }
  }
}

std::vector<double> GeodesicGraph::distances_from(int source) const {
  if (source < 0 || source >= size()) throw InvalidArgument("geodesic source vertex out of range");
  std::vector<double> dist(size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const double nd = d + weights_[e];
      if (nd < dist[targets_[e]]) {
        dist[targets_[e]] = nd;
        heap.emplace(nd, targets_[e]);
      }
    }
  }
  return dist;
}

double GeodesicGraph::distance(int a, int b) const {
  return pair_distances({{a, b}}).front();
}

std::vector<double> GeodesicGraph::pair_distances(
    const std::vector<std::pair<int, int>>& pairs) const {
  std::vector<double> out(pairs.size(), kInf);
  std::map<int, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].first < 0 || pairs[i].first >= size() || pairs[i].second < 0 ||
        pairs[i].second >= size()) {
      throw InvalidArgument("geodesic query vertex out of range");
    }
    by_source[pairs[i].first].push_back(i);
  }
  std::vector<double> dist(size(), kInf);
  std::vector<char> settled(size(), 0), wanted(size(), 0);
  std::vector<int> touched;
  using Item = std::pair<double, int>;
  for (const auto& [source, queries] : by_source) {
    int remaining = 0;
    for (std::size_t q : queries) {
      if (!wanted[pairs[q].second]) {
        wanted[pairs[q].second] = 1;
        ++remaining;
      }
    }
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    touched.push_back(source);
    heap.emplace(0.0, source);
    while (!heap.empty() && remaining > 0) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (settled[v] || d > dist[v]) continue;
      settled[v] = 1;
      if (wanted[v]) --remaining;
      for (int e = offsets_[v]; e < offsets_[v + 1]; ++e) {
        const int w = targets_[e];
        const double nd = d + weights_[e];
        if (nd < dist[w]) {
          if (dist[w] == kInf) touched.push_back(w);
          dist[w] = nd;
          heap.emplace(nd, w);
        }
      }
    }
    for (std::size_t q : queries) out[q] = settled[pairs[q].second] ? dist[pairs[q].second] : kInf;
    for (int v : touched) {
      dist[v] = kInf;
      settled[v] = 0;
    }
    touched.clear();
    for (std::size_t q : queries) wanted[pairs[q].second] = 0;
  }
  return out;
}

double GeodesicErrorReport::coverage(double threshold) const {
  if (errors.empty()) return 1.0;
  const auto count = std::count_if(errors.begin(), errors.end(),
                                   [&](double e) { return e <= threshold; });
  return static_cast<double>(count) / static_cast<double>(errors.size());
}

GeodesicErrorReport make_report(std::vector<double> errors) {
  GeodesicErrorReport r;
  r.errors = std::move(errors);
  if (!r.errors.empty()) {
    std::vector<double> sorted = r.errors;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double e : sorted) sum += e;
    r.mean = sum / static_cast<double>(sorted.size());
    const std::size_t m = sorted.size() / 2;
    r.median = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
    r.min = sorted.front();
    r.max = sorted.back();
  }
  r.thresholds.resize(kCurveSamples);
  r.curve.resize(kCurveSamples);
  for (int i = 0; i < kCurveSamples; ++i) {
    r.thresholds[i] = kCurveMaxThreshold * i / (kCurveSamples - 1);
    r.curve[i] = r.coverage(r.thresholds[i]);
  }
  return r;
}

GeodesicErrorReport geodesic_error(const PointMap& map, const PointMap& ground_truth,
                                   const TriMesh& target) {
  return geodesic_error(map, ground_truth, target, GeodesicGraph(target));
}

GeodesicErrorReport geodesic_error(const PointMap& map, const PointMap& ground_truth,
                                   const TriMesh& target, const GeodesicGraph& graph) {
  if (map.size() != ground_truth.size()) {
    throw InvalidArgument("map and ground truth have different lengths");
  }
  check_map(map, target.num_vertices(), "map");
  check_map(ground_truth, target.num_vertices(), "ground truth");
  std::vector<std::pair<int, int>> pairs(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) pairs[i] = {ground_truth[i], map[i]};
  std::vector<double> d = graph.pair_distances(pairs);
  const double scale = 1.0 / std::sqrt(target.total_area());
  for (double& e : d) e *= scale;
  return make_report(std::move(d));
}

double flip_rate(const PointMap& map, const PointMap& ground_truth,
                 const std::vector<int>& symmetry, const GeodesicGraph& graph) {
  if (map.size() != ground_truth.size()) {
    throw InvalidArgument("map and ground truth have different lengths");
  }
  if (map.empty()) return 0.0;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(2 * map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    pairs.emplace_back(map[i], ground_truth[i]);
    pairs.emplace_back(map[i], symmetry.at(ground_truth[i]));
  }
  const std::vector<double> d = graph.pair_distances(pairs);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (d[2 * i] > d[2 * i + 1]) ++flips;
  }
  return static_cast<double>(flips) / static_cast<double>(map.size());
}

AccuracyRun make_run(std::string pair, std::string method, const GeodesicErrorReport& report) {
  return {std::move(pair), std::move(method), report.mean, report.median, report.min};
}

std::vector<MethodSummary> summarize(const std::vector<AccuracyRun>& runs) {
  std::vector<MethodSummary> out;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MethodSummary& s) { return s.method == r.method; });
    if (it == out.end()) {
      out.push_back({r.method});
      it = out.end() - 1;
    }
    ++it->pairs;
    it->avg += r.mean;
    it->median += r.median;
    it->min += r.min;
  }
  for (auto& s : out) {
    s.avg /= s.pairs;
    s.median /= s.pairs;
    s.min /= s.pairs;
  }
  return out;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRun>& runs) {
  const auto precision = out.precision(10);
  out << "pair,method,mean,median,min\n";
  for (const auto& r : runs) {
    out << r.pair << ',' << r.method << ',' << r.mean << ',' << r.median << ',' << r.min << '\n';
  }
  out.precision(precision);
}

void write_accuracy_markdown(std::ostream& out, const std::vector<AccuracyRun>& runs) {
  const auto precision = out.precision(4);
  out << "| Method | Pairs | Avg. | Median | Min |\n|---|---|---|---|---|\n";
  for (const auto& s : summarize(runs)) {
    out << "| " << s.method << " | " << s.pairs << " | " << s.avg << " | " << s.median << " | "
        << s.min << " |\n";
  }
  out.precision(precision);
}

}  // namespace cfmaps
