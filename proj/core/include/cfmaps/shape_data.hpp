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

#include "cfmaps/basis_cache.hpp"
#include "cfmaps/fmaps.hpp"

#include <vector>

namespace cfmaps {

/// Everything the map estimators need about one shape: operators, bases and
/// the reduced tensors derived from them.
struct ShapeData {
  TriMesh mesh;
  MassMatrix mass;
  CotanLaplacian laplacian;
  TangentFrames frames;
  VertexGradientOperator gradient;
  DivergenceOperator divergence;
  ConnectionLaplacian connection;
  SpectralBasis basis;
  ComplexSpectralBasis complex_basis;
  MatrixXc grad_phi;  ///< G Phi, |V| x k_Phi
  MatrixXc div_psi;   ///< Dv Psi, |V| x k_Psi; Re(Dv Psi x) is the divergence
  /// reduced_df[l] = Phi^T A diag(conj grad Phi_l) Psi, k_Phi x k_Psi.
  std::vector<MatrixXc> reduced_df;

  int k_real() const { return basis.size(); }
  int k_complex() const { return complex_basis.size(); }
  int num_vertices() const { return mesh.num_vertices(); }
};

/// Computes bases with the default frames.
ShapeData make_shape_data(const TriMesh& mesh, int k_real, int k_complex,
                          const EigenOptions& options = {});

/// Uses the given frames; the complex basis is computed for them.
ShapeData make_shape_data(const TriMesh& mesh, const TangentFrames& frames, int k_real,
                          int k_complex, const EigenOptions& options = {});

/// Reuses precomputed bases, which must belong to the default frames of `mesh`.
ShapeData make_shape_data(const TriMesh& mesh, const BasisBundle& bases);

/// Reduced D_f for f = Phi c, truncated to k_phi x k_psi.
MatrixXc reduced_df_combination(const ShapeData& shape, const Eigen::Ref<const VectorXd>& c,
                                int k_phi, int k_psi);

}  // namespace cfmaps
