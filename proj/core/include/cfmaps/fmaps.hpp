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

#include "cfmaps/spectral.hpp"
#include "cfmaps/tangent.hpp"

#include <string>

namespace cfmaps {

/// Functional maps in this library follow the pullback convention: for a
/// point map from shape P to shape R, C = Phi_P^T A_P Pi Phi_R is k_P x k_R
/// and sends spectral coefficients of a function on R to those of its
/// composition with the map, a function on P.

struct DescriptorSet {
  MatrixXd values;  ///< |V| x d
  std::string kind;
  VectorXd energies;
};

struct WksOptions {
  int count = 50;
  double variance = 6.0;  ///< Gaussian width in units of the log-energy step
};

DescriptorSet wks_descriptors(const SpectralBasis& basis, const WksOptions& options = {});

struct FmapWeights {
  double descriptor = 1.0;
  double commutativity = 1.0;
  double laplacian = 1e-2;
  double ridge = 1e-8;
};

/// Least-squares functional map from descriptors on P (source) and R (target).
MatrixXd fmap_from_descriptors(const DescriptorSet& source, const DescriptorSet& target,
                               const SpectralBasis& source_basis,
                               const SpectralBasis& target_basis,
                               const FmapWeights& weights = {});

MatrixXd fmap_from_pointmap(const PointMap& map, const SpectralBasis& source_basis,
                            const SpectralBasis& target_basis);

/// (D_X f)_i = <X_i, grad f_i>, the real inner product of tangent vectors.
struct VectorFieldOperator {
  SparseMatrixd matrix;

  VectorXd apply(const VectorXd& f) const { return matrix * f; }
  /// Phi^T A D_X Phi.
  MatrixXd reduced(const SpectralBasis& basis) const;
};

/// Diagonal operator with entries conj(grad f_i); Re(D_f X) = D_X f.
struct FunctionOperator {
  VectorXc diag;

  VectorXc apply(const VectorXc& field) const { return diag.cwiseProduct(field); }
  /// Phi^T A D_f Psi, complex k_Phi x k_Psi.
  MatrixXc reduced(const SpectralBasis& functions, const ComplexSpectralBasis& fields) const;
};

VectorFieldOperator dx_operator(const VectorXc& field, const VertexGradientOperator& gradient);
FunctionOperator df_operator(const VectorXd& f, const VertexGradientOperator& gradient);

}  // namespace cfmaps
