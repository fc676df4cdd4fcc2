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

#include "cfmaps/shape_data.hpp"

#include <filesystem>

namespace cfmaps {

/// Nearest row of Phi_R for every row of Phi_P C (C is k_P x k_R).
PointMap pointmap_from_fmap(const MatrixXd& C, const SpectralBasis& P, const SpectralBasis& R);

/// Real embedding of a complex matrix: columns [Re c1, Im c1, Re c2, ...].
MatrixXd flatten_complex(const MatrixXc& m);

/// Nearest row of flatten(Dv_R Psi_R) for every row of flatten(Dv_P Psi_P Q).
PointMap pointmap_from_q(const MatrixXc& Q, const ShapeData& P, const ShapeData& R);

struct IcpResult {
  MatrixXd C;
  PointMap map;
  std::vector<double> residuals;  ///< A-weighted embedding residual after each point-map step
};

/// Alternates nearest-neighbour point maps with the orthogonal re-fit of C.
IcpResult icp_refine(const MatrixXd& C, const SpectralBasis& P, const SpectralBasis& R,
                     int iterations);

/// sum_i A_i ||(Phi_P C)_i - (Phi_R)_{map(i)}||^2.
double embedding_residual(const MatrixXd& C, const PointMap& map, const SpectralBasis& P,
                          const SpectralBasis& R);

/// Nearest orthogonal matrix (polar factor).
MatrixXd orthogonal_projection(const MatrixXd& m);

void save_pointmap(const std::filesystem::path& path, const PointMap& map);
PointMap load_pointmap(const std::filesystem::path& path);

/// Colours each source vertex by the position of its image on the target
/// mesh, normalized to its bounding box, and writes a colour PLY. A ".vtk"
/// path instead stores the image coordinates as point scalars.
void save_pointmap_colors(const std::filesystem::path& path, const TriMesh& source,
                          const TriMesh& target, const PointMap& map);

}  // namespace cfmaps
