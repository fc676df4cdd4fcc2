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

#include <cfmaps/fmaps.hpp>
#include <cfmaps/qmaps.hpp>
#include <cfmaps/shape_data.hpp>
#include <cfmaps/shapes.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace cfmaps;

struct Pair {
  ShapeData P;
  ShapeData R;
  MatrixXd C;
};

const Pair& rigid_pair() {
  static const Pair pair = [] {
    const TriMesh m = shapes::bumpy_sphere(3, 3);
    const auto copy = shapes::rigid_copy(m, 4);
    ShapeData P = make_shape_data(copy.mesh, 50, 50), R = make_shape_data(m, 50, 50);
    MatrixXd C = fmap_from_pointmap(copy.to_source, P.basis, R.basis);
    return Pair{std::move(P), std::move(R), std::move(C)};
  }();
  return pair;
}

void BM_QProcrustes(benchmark::State& state) {
  const Pair& p = rigid_pair();
  const int k = static_cast<int>(state.range(0));
  const MatrixXd C = p.C.topLeftCorner(k, k);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_q_procrustes(C, p.P, p.R));
}
BENCHMARK(BM_QProcrustes)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_QLeastSquares(benchmark::State& state) {
  const Pair& p = rigid_pair();
  const int k = static_cast<int>(state.range(0));
  const MatrixXd C = p.C.topLeftCorner(k, k);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_q_lsq(C, p.P, p.R));
}
BENCHMARK(BM_QLeastSquares)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
