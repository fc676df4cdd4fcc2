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

#include <cfmaps/eigensolver.hpp>
#include <cfmaps/mesh.hpp>
#include <cfmaps/shapes.hpp>
#include <cfmaps/tangent.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace cfmaps;

void BM_LaplacianEigenpairs(benchmark::State& state) {
  const TriMesh mesh = shapes::bumpy_sphere(static_cast<int>(state.range(0)), 1);
  const SparseMatrixd W = cotan_laplacian(mesh).matrix;
  const VectorXd A = mass_matrix(mesh).diag;
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(W, A, k).values);
  state.counters["vertices"] = mesh.num_vertices();
}
BENCHMARK(BM_LaplacianEigenpairs)->Args({3, 30})->Args({4, 30})->Args({4, 100})
    ->Unit(benchmark::kMillisecond);

void BM_ConnectionEigenpairs(benchmark::State& state) {
  const TriMesh mesh = shapes::bumpy_sphere(static_cast<int>(state.range(0)), 1);
  const SparseMatrixc L = connection_laplacian(mesh, build_frames(mesh)).matrix;
  const VectorXd A = mass_matrix(mesh).diag;
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(L, A, k).values);
  state.counters["vertices"] = mesh.num_vertices();
}
BENCHMARK(BM_ConnectionEigenpairs)->Args({3, 30})->Args({4, 50})->Unit(benchmark::kMillisecond);

}  // namespace
