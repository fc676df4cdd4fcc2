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

#include "cfmaps/errors.hpp"
#include "cfmaps/types.hpp"

#include <cstdint>
#include <vector>

namespace cfmaps {

struct EigenOptions {
  double tolerance = 1e-10;  ///< on ||Kx - lambda A x|| / (||K||_inf ||x||)
  int max_iterations = 500;
  int block_size = 8;
  int dense_threshold = 500;  ///< use a dense solver up to this many rows
  bool force_iterative = false;
  std::uint64_t seed = 0x5eed;
};

/// Non-convergence of the iterative solver.
class EigenSolverError : public SolverError {
 public:
  EigenSolverError(const std::string& what, int converged, std::vector<double> residuals)
      : SolverError(what), converged_(converged), residuals_(std::move(residuals)) {}
  int converged() const { return converged_; }
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  int converged_;
  std::vector<double> residuals_;
};

template <typename Scalar>
struct EigenPairs {
  VectorXd values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  ///< A-orthonormal columns
  VectorXd residuals;
};

/// k smallest eigenpairs of K x = lambda diag(mass) x for Hermitian K and a
/// strictly positive diagonal mass. Eigenvalues ascending.
EigenPairs<double> smallest_eigenpairs(const SparseMatrixd& K, const VectorXd& mass, int k,
                                       const EigenOptions& options = {});
EigenPairs<Complex> smallest_eigenpairs(const SparseMatrixc& K, const VectorXd& mass, int k,
                                        const EigenOptions& options = {});

double relative_residual(const SparseMatrixd& K, const VectorXd& mass, double lambda,
                         const VectorXd& x);
double relative_residual(const SparseMatrixc& K, const VectorXd& mass, double lambda,
                         const VectorXc& x);

}  // namespace cfmaps
