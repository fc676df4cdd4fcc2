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

#include "cfmaps/spectral.hpp"

#include <algorithm>
#include <numeric>

namespace cfmaps {

namespace {

void check_truncation(int k, int available) {
  if (k < 1 || k > available) {
    throw InvalidArgument("cannot truncate a basis of size " + std::to_string(available) +
                          " to " + std::to_string(k));
  }
}

}  // namespace

SpectralBasis SpectralBasis::truncated(int k) const {
  check_truncation(k, size());
  return {phi.leftCols(k), lambda.head(k), mass};
}

VectorXd SpectralBasis::project(const VectorXd& f) const {
  return phi.transpose() * mass.cwiseProduct(f);
}

ComplexSpectralBasis ComplexSpectralBasis::truncated(int k) const {
  check_truncation(k, size());
  return {psi.leftCols(k), lambda.head(k), mass};
}

VectorXc ComplexSpectralBasis::project(const VectorXc& field) const {
  return psi.adjoint() * (mass.cast<Complex>().asDiagonal() * field);
}

SpectralBasis eig_real(const CotanLaplacian& W, const MassMatrix& A, int k,
                       const EigenOptions& options) {
  auto pairs = smallest_eigenpairs(W.matrix, A.diag, k, options);
  return {std::move(pairs.vectors), std::move(pairs.values), A.diag};
}

ComplexSpectralBasis eig_complex(const ConnectionLaplacian& L, const MassMatrix& A, int k,
                                 const EigenOptions& options) {
  auto pairs = smallest_eigenpairs(L.matrix, A.diag, k, options);
  // Ascending values already sort by modulus unless a non-Delaunay mesh
  // produces small negative eigenvalues.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(pairs.values[a]) < std::abs(pairs.values[b]);
  });
  ComplexSpectralBasis basis{MatrixXc(pairs.vectors.rows(), k), VectorXd(k), A.diag};
  for (int j = 0; j < k; ++j) {
    basis.psi.col(j) = pairs.vectors.col(order[j]);
    basis.lambda[j] = pairs.values[order[j]];
  }
  return basis;
}

}  // namespace cfmaps
