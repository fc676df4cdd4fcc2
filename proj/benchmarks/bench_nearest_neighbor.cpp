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

#include <cfmaps/nearest_neighbor.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace cfmaps;

// Coordinate scales decay like a spectral embedding's.
MatrixXd random_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd m(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = g(rng) / (1.0 + j);
  return m;
}

void BM_TreeQuery(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  const MatrixXd points = random_points(n, d, 1), queries = random_points(n, d, 2);
  const NearestNeighborIndex index(points, 0);
  for (auto _ : state) benchmark::DoNotOptimize(index.query(queries));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_TreeQuery)->Args({5000, 3})->Args({5000, 30})->Args({5000, 50})
    ->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  const MatrixXd points = random_points(n, d, 1), queries = random_points(n, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_nearest(points, queries));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BruteForce)->Args({5000, 3})->Args({5000, 30})->Args({5000, 50})->Unit(benchmark::kMillisecond);

}  // namespace
