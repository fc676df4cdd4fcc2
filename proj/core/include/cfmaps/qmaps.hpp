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

namespace cfmaps {

/// Complex functional maps share the pair convention of functional maps: for
/// a map from P to R with C = fmap_from_pointmap(map, P, R), Q is
/// k_Psi(P) x k_Psi(R) and sends complex spectral coefficients of a tangent
/// field on R to those of its pushforward on P.

struct QOptions {
  int probe_count = 0;  ///< probe functions Phi_R[0..n); 0 means all of C's columns
  int k_complex_source = 0;  ///< k_Psi on P; 0 means C.rows()
  int k_complex_target = 0;  ///< k_Psi on R; 0 means C.cols()
  double pinv_cutoff = 1e-10;
};

/// Stacked blocks of the dual energy sum_i ||A_i - B_i Q||^2 with
/// A_i = C D_{f_i}^R and B_i = D_{C f_i}^P.
struct QSystem {
  MatrixXc A;  ///< (k_P * probes) x k_Psi(R)
  MatrixXc B;  ///< (k_P * probes) x k_Psi(P)
};

QSystem assemble_q_system(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                          const QOptions& options = {});

MatrixXc estimate_q_lsq(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                        const QOptions& options = {});

struct ProcrustesResult {
  MatrixXc Q;
  VectorXd singular_values;
  bool ill_conditioned = false;
};

ProcrustesResult estimate_q_procrustes_full(const MatrixXd& C, const ShapeData& P,
                                            const ShapeData& R, const QOptions& options = {});
MatrixXc estimate_q_procrustes(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                               const QOptions& options = {});

/// sum_i ||C D_{f_i}^R - D_{C f_i}^P Q||_F^2 in the reduced bases.
double q_energy(const MatrixXd& C, const MatrixXc& Q, const ShapeData& P, const ShapeData& R,
                const QOptions& options = {});

/// sum_X ||C D_X^R - D_{QX}^P C||_F^2 over X in {Psi_j, i Psi_j}, evaluated
/// with the sparse vector-field operators.
double cq_energy(const MatrixXd& C, const MatrixXc& Q, const ShapeData& P, const ShapeData& R);

struct ClosedFormQ {
  VectorXc q;          ///< per vertex of P
  VectorXd residual;   ///< per-vertex relative least-squares residual
  MatrixXc Q;          ///< Psi_P^* A_P D(q) Pi Psi_R
};

enum class ClosedFormProbes { hat, spectral };

/// Best per-vertex similarity aligning tangent planes under `map` (P -> R).
/// The hat-function probes of the shared-connectivity case are the default;
/// spectral probes use the low-frequency eigenfunctions of R instead.
ClosedFormQ q_closed_form(const PointMap& map, const ShapeData& P, const ShapeData& R,
                          ClosedFormProbes probes = ClosedFormProbes::hat,
                          int probe_count = 0);

/// ||diag(lambda_P) Q - Q diag(lambda_R)||_F / (||Q||_F max |lambda|).
double check_isometry_commutator(const MatrixXc& Q, const ComplexSpectralBasis& P,
                                 const ComplexSpectralBasis& R);

}  // namespace cfmaps
