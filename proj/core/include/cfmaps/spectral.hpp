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

#include "cfmaps/eigensolver.hpp"
#include "cfmaps/mesh.hpp"
#include "cfmaps/tangent.hpp"

namespace cfmaps {

/// Eigenfunctions of the cotan Laplacian, A-orthonormal.
struct SpectralBasis {
  MatrixXd phi;     ///< |V| x k
  VectorXd lambda;  ///< ascending
  VectorXd mass;    ///< lumped mass diagonal

  int size() const { return static_cast<int>(phi.cols()); }
  int num_vertices() const { return static_cast<int>(phi.rows()); }
  SpectralBasis truncated(int k) const;
  /// Coefficients Phi^T A f.
  VectorXd project(const VectorXd& f) const;
  VectorXd reconstruct(const VectorXd& coefficients) const { return phi * coefficients; }
};

/// Eigenvector fields of the connection Laplacian, A-orthonormal.
struct ComplexSpectralBasis {
  MatrixXc psi;
  VectorXd lambda;  ///< ascending in modulus
  VectorXd mass;

  int size() const { return static_cast<int>(psi.cols()); }
  int num_vertices() const { return static_cast<int>(psi.rows()); }
  ComplexSpectralBasis truncated(int k) const;
  /// Coefficients Psi^* A X.
  VectorXc project(const VectorXc& field) const;
  VectorXc reconstruct(const VectorXc& coefficients) const { return psi * coefficients; }
};

SpectralBasis eig_real(const CotanLaplacian& W, const MassMatrix& A, int k,
                       const EigenOptions& options = {});

ComplexSpectralBasis eig_complex(const ConnectionLaplacian& L, const MassMatrix& A, int k,
                                 const EigenOptions& options = {});

}  // namespace cfmaps
