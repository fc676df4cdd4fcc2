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

#include "cfmaps/qmaps.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cfmaps {

/// Refinement runs between shapes M and N. Maps are named by direction:
/// map_mn sends each vertex of M to a vertex of N.

struct RefinementSchedule {
  std::vector<int> k_list;
  int inner_loops = 10;

  static RefinementSchedule range(int k_start, int k_end, int step = 1, int inner_loops = 10);
  void validate(int max_k) const;
};

enum class RefinementAlgorithm { zoomout, complex_zoomout, bijective, discrete_conformal,
                                 discrete_isometric };

std::string to_string(RefinementAlgorithm algo);
/// Accepts zo, czo, cbzo, cdo-conf, cdo-iso.
std::optional<RefinementAlgorithm> parse_refinement_algorithm(std::string_view name);

struct RefinementStep {
  int k = 0;
  int inner = 0;
  double residual = 0.0;  ///< A-weighted ||Phi_M C_NM - Pi_MN Phi_N||^2 after the step
  const MatrixXd* C = nullptr;       ///< C_NM at the step's point-map estimate
  const MatrixXc* Q = nullptr;       ///< Q_NM when a Q-step ran
  const PointMap* map_mn = nullptr;  ///< point map the step started from
};

struct RefinementOptions {
  bool use_q_step = true;
  double conformal_weight = 1e-3;  ///< mu in C_rc / (1 + mu (lambda_r - lambda_c)^2)
  std::function<void(const RefinementStep&)> observer;
};

struct RefinementLogEntry {
  int k;
  int inner;
  double residual;
};

struct RefinementResult {
  PointMap map_mn;
  PointMap map_nm;  ///< filled by the bijective algorithm only
  std::vector<RefinementLogEntry> log;
};

RefinementResult zoomout(const PointMap& map_mn, const ShapeData& M, const ShapeData& N,
                         const RefinementSchedule& schedule,
                         const RefinementOptions& options = {});

RefinementResult complex_zoomout(const PointMap& map_mn, const ShapeData& M, const ShapeData& N,
                                 const RefinementSchedule& schedule,
                                 const RefinementOptions& options = {});

RefinementResult complex_bijective_zoomout(const PointMap& map_mn, const PointMap& map_nm,
                                           const ShapeData& M, const ShapeData& N,
                                           const RefinementSchedule& schedule,
                                           const RefinementOptions& options = {});

enum class DiscreteEnergy { conformal, isometric };

RefinementResult complex_discrete_optimization(const PointMap& map_mn, const ShapeData& M,
                                               const ShapeData& N,
                                               const RefinementSchedule& schedule,
                                               DiscreteEnergy energy,
                                               const RefinementOptions& options = {});

/// Dispatches on the algorithm; map_nm is only used by the bijective variant
/// and defaults to the map obtained from a transposed initial C.
RefinementResult refine(RefinementAlgorithm algo, const PointMap& map_mn,
                        const PointMap* map_nm, const ShapeData& M, const ShapeData& N,
                        const RefinementSchedule& schedule,
                        const RefinementOptions& options = {});

/// Seeded random orthonormal k x k functional map.
MatrixXd random_orthonormal(int k, std::uint64_t seed);

/// Point map M -> N from a random orthonormal C_NM of size k.
PointMap random_initial_map(const ShapeData& M, const ShapeData& N, int k, std::uint64_t seed);

/// Ordinary least squares C_MN = [Phi_N; Pi_MN Phi_N]^+ [Pi_NM Phi_M; Phi_M].
MatrixXd bijective_fmap(const PointMap& map_mn, const PointMap& map_nm, const MatrixXd& phi_m,
                        const MatrixXd& phi_n);

}  // namespace cfmaps
