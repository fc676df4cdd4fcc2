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

#include "test_support.hpp"

#include <cfmaps/errors.hpp>
#include <cfmaps/fmaps.hpp>
#include <cfmaps/qmaps.hpp>
#include <cfmaps/transfer.hpp>

#include <gtest/gtest.h>

namespace cfmaps {
namespace {

/// P is a rotated, re-indexed copy of R; gt maps P -> R.
struct RigidPair {
  ShapeData P, R;
  PointMap gt;
};

const RigidPair& rigid_pair() {
  static const RigidPair pair = [] {
    const TriMesh m = shapes::bumpy_sphere(2, 21);
    const auto copy = shapes::rigid_copy(m, 4);
    return RigidPair{make_shape_data(copy.mesh, 30, 30), make_shape_data(m, 30, 30),
                     copy.to_source};
  }();
  return pair;
}

const ShapeData& bumpy() {
  return test::cached_shape("bumpy2-21", [] { return shapes::bumpy_sphere(2, 21); }, 30, 30);
}

double max_unitarity_defect(const MatrixXc& Q) {
  return (Q.adjoint() * Q - MatrixXc::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

TEST(EstimateQLsq, IdentityOnSameMesh) {
  const ShapeData& s = bumpy();
  const MatrixXc Q = estimate_q_lsq(MatrixXd::Identity(20, 20), s, s);
  EXPECT_LT((Q - MatrixXc::Identity(20, 20)).norm(), 1e-6);
}

TEST(EstimateQLsq, IsAMinimizer) {
  const RigidPair& p = rigid_pair();
  const MatrixXd C_gt = fmap_from_pointmap(p.gt, p.P.basis.truncated(20), p.R.basis.truncated(20));
  const MatrixXd C = make_noisy_fmap(C_gt, {NoiseKind::random, 0.1, 7});
  const MatrixXc Q = estimate_q_lsq(C, p.P, p.R);
  const double e = q_energy(C, Q, p.P, p.R);
  EXPECT_LE(e, q_energy(C, MatrixXc::Identity(20, 20), p.P, p.R));
  EXPECT_LE(e, q_energy(C, MatrixXc::Zero(20, 20), p.P, p.R));
  // Local optimality: small perturbations do not decrease the energy.
  for (int t = 0; t < 5; ++t) {
    MatrixXc dQ = (test::random_matrix(20, 20, 50 + t) + Complex(0, 1) * test::random_matrix(20, 20, 60 + t)).eval();
    EXPECT_GE(q_energy(C, Q + 1e-4 * dQ, p.P, p.R), e * (1 - 1e-12));
  }
}

TEST(EstimateQLsq, RecoversClosedFormOnRigidPair) {
  const RigidPair& p = rigid_pair();
  const MatrixXd C = fmap_from_pointmap(p.gt, p.P.basis.truncated(20), p.R.basis.truncated(20));
  const MatrixXc Q = estimate_q_lsq(C, p.P, p.R);
  const MatrixXc Q_gt = q_closed_form(p.gt, p.P, p.R).Q.topLeftCorner(20, 20);
  EXPECT_LT((Q - Q_gt).norm(), 1e-4);
}

TEST(EstimateQLsq, RectangularAndErrors) {
  const RigidPair& p = rigid_pair();
  const MatrixXd C = fmap_from_pointmap(p.gt, p.P.basis.truncated(12), p.R.basis.truncated(16));
  QOptions o;
  o.k_complex_source = 10;
  o.k_complex_target = 14;
  o.probe_count = 8;
  const MatrixXc Q = estimate_q_lsq(C, p.P, p.R, o);
  EXPECT_EQ(Q.rows(), 10);
  EXPECT_EQ(Q.cols(), 14);
  EXPECT_TRUE(Q.allFinite());
  o.probe_count = 17;
  EXPECT_THROW(estimate_q_lsq(C, p.P, p.R, o), InvalidArgument);
  EXPECT_THROW(estimate_q_lsq(MatrixXd::Identity(40, 40), p.P, p.R), InvalidArgument);
  EXPECT_THROW(estimate_q_procrustes(C, p.P, p.R, o), InvalidArgument);
}

TEST(EstimateQLsq, RankDeficientSystemWarns) {
  const ShapeData& s = bumpy();
  ScopedWarningCapture capture;
  const MatrixXc Q = estimate_q_lsq(MatrixXd::Zero(10, 10), s, s);
  EXPECT_TRUE(capture.contains("rank_deficient_q_system"));
  EXPECT_TRUE(Q.allFinite());
}

TEST(EstimateQProcrustes, UnitaryForRandomC) {
  const RigidPair& p = rigid_pair();
  for (int t = 0; t < 5; ++t) {
    const MatrixXd C = test::random_matrix(20, 20, 100 + t);
    const ProcrustesResult r = estimate_q_procrustes_full(C, p.P, p.R);
    EXPECT_LT(max_unitarity_defect(r.Q), 1e-8);
    EXPECT_EQ(r.singular_values.size(), 20);
  }
}

TEST(EstimateQProcrustes, IdentityUpToPhases) {
  const ShapeData& s = bumpy();
  const MatrixXc Q = estimate_q_procrustes(MatrixXd::Identity(20, 20), s, s);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(std::abs(Q(i, i)), 1.0, 1e-6);
  EXPECT_FALSE(estimate_q_procrustes_full(MatrixXd::Identity(20, 20), s, s).ill_conditioned);
  EXPECT_TRUE(estimate_q_procrustes_full(MatrixXd::Zero(20, 20), s, s).ill_conditioned);
}

TEST(EstimateQProcrustes, SymmetricNoiseStaysWithDirectMap) {
  const auto pair = test::symmetric_pair(3, 2, 30, 30);
  const int k = 20;
  const SpectralBasis bp = pair.P.basis.truncated(k), br = pair.R.basis.truncated(k);
  const MatrixXd C_gt = fmap_from_pointmap(pair.gt, bp, br);
  const MatrixXd C_sym = fmap_from_pointmap(pair.sym_gt, bp, br);
  const MatrixXd C = make_noisy_fmap(C_gt, {NoiseKind::symmetric, 0.5, 0}, &C_sym);
  const MatrixXc Q = estimate_q_procrustes(C, pair.P, pair.R);
  const MatrixXc Q_gt = q_closed_form(pair.gt, pair.P, pair.R).Q.topLeftCorner(k, k);
  const MatrixXc Q_ref = q_closed_form(pair.sym_gt, pair.P, pair.R).Q.topLeftCorner(k, k);
  EXPECT_LT((Q - Q_gt).norm(), (Q - Q_ref).norm());
}

TEST(ClosedForm, IdentityMap) {
  const ShapeData& s = bumpy();
  const ClosedFormQ c = q_closed_form(test::identity_map(s.num_vertices()), s, s);
  EXPECT_LT((c.q - VectorXc::Ones(s.num_vertices())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(c.residual.maxCoeff(), 1e-20);
  EXPECT_LT((c.Q - MatrixXc::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-8);
  const ClosedFormQ sp =
      q_closed_form(test::identity_map(s.num_vertices()), s, s, ClosedFormProbes::spectral, 10);
  EXPECT_LT((sp.q - VectorXc::Ones(s.num_vertices())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ClosedForm, SimilarityScale) {
  const TriMesh m = shapes::icosphere(2);
  const ShapeData R = make_shape_data(m, 20, 20);
  const auto copy = shapes::rigid_copy(m, 9, 2.0);
  const ShapeData P = make_shape_data(copy.mesh, 20, 20);
  const ClosedFormQ c = q_closed_form(copy.to_source, P, R);
  for (int v = 0; v < P.num_vertices(); ++v) EXPECT_NEAR(std::abs(c.q[v]), 2.0, 1e-6);
}

TEST(ClosedForm, ReducedQIsUnitaryOnDirectPairs) {
  // The pushforward of a similarity scales the A-norm of a field by s^2.
  const TriMesh m = shapes::bumpy_sphere(2, 21);
  const ShapeData R = make_shape_data(m, 30, 16);
  for (double s : {1.0, 1.5}) {
    const auto copy = shapes::rigid_copy(m, 13, s);
    const ShapeData P = make_shape_data(copy.mesh, 30, 16);
    const MatrixXc Q = q_closed_form(copy.to_source, P, R).Q;
    const double s4 = s * s * s * s;
    EXPECT_LT((Q.adjoint() * Q / s4 - MatrixXc::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-6)
        << "scale " << s;
  }
}

TEST(ClosedForm, MirrorIsNotConformal) {
  const ShapeData& s = bumpy();
  const ShapeData mirror = make_shape_data(shapes::mirrored(s.mesh), 30, 2);
  const PointMap id = test::identity_map(s.num_vertices());
  const double direct = q_closed_form(id, s, s).residual.mean();
  const double reflected = q_closed_form(id, mirror, s).residual.mean();
  EXPECT_GT(reflected, 10.0 * direct);
  EXPECT_GT(reflected, 0.1);
}

TEST(ClosedForm, Errors) {
  const ShapeData& s = bumpy();
  PointMap bad = test::identity_map(s.num_vertices());
  bad[3] = s.num_vertices();
  EXPECT_THROW(q_closed_form(bad, s, s), InvalidArgument);
  bad.pop_back();
  EXPECT_THROW(q_closed_form(bad, s, s), InvalidArgument);
}

TEST(ClosedForm, CollapsedMapFallsBackToNeighbours) {
  const ShapeData& s = bumpy();
  PointMap map = test::identity_map(s.num_vertices());
  // Vertex 0 and its whole stencil collapse onto one target vertex, so every
  // pulled-back spectral probe is constant around it.
  for (int v : s.mesh.neighbors(0)) map[v] = 0;
  ScopedWarningCapture capture;
  const ClosedFormQ c = q_closed_form(map, s, s, ClosedFormProbes::spectral);
  EXPECT_TRUE(capture.contains("zero_probe_gradient"));
  EXPECT_TRUE(c.q.allFinite());
}

TEST(IsometryCommutator, OrdersPairsByDistortion) {
  const ShapeData& s = bumpy();
  EXPECT_LT(check_isometry_commutator(MatrixXc::Identity(20, 20), s.complex_basis, s.complex_basis),
            1e-8);
  const RigidPair& p = rigid_pair();
  const MatrixXc Q_rigid = q_closed_form(p.gt, p.P, p.R).Q.topLeftCorner(20, 20);
  const double rigid = check_isometry_commutator(Q_rigid, p.P.complex_basis, p.R.complex_basis);
  EXPECT_LT(rigid, 1e-6);
  const Eigen::Matrix3d stretch = Eigen::Vector3d(1.5, 1.0, 1.0).asDiagonal();
  const ShapeData S = make_shape_data(shapes::linearly_transformed(p.R.mesh, stretch), 2, 20);
  const MatrixXc Q_stretch =
      q_closed_form(test::identity_map(S.num_vertices()), S, p.R).Q.topLeftCorner(20, 20);
  EXPECT_GT(check_isometry_commutator(Q_stretch, S.complex_basis, p.R.complex_basis), rigid);
  EXPECT_THROW(check_isometry_commutator(MatrixXc::Identity(40, 40), s.complex_basis,
                                         s.complex_basis),
               InvalidArgument);
}

TEST(Energies, DualityInFullBasis) {
  for (int seed : {1, 2}) {
    const TriMesh mr = shapes::bumpy_sphere(0, seed);
    const TriMesh mp = shapes::bumpy_sphere(0, seed + 10);
    const int n = mr.num_vertices();
    const ShapeData R = make_shape_data(mr, n, n), P = make_shape_data(mp, n, n);
    const MatrixXd C = test::random_matrix(n, n, seed);
    const MatrixXc Q = test::random_matrix(n, n, seed + 1).cast<Complex>() +
                       Complex(0, 1) * test::random_matrix(n, n, seed + 2);
    const double primal = cq_energy(C, Q, P, R);
    const double dual = q_energy(C, Q, P, R);
    EXPECT_NEAR(primal, dual, 1e-10 * dual);
  }
}

TEST(Energies, OrientationAwareness) {
  const TriMesh m = shapes::bumpy_sphere(2, 21);
  const RigidPair& p = rigid_pair();
  const int k = 20;
  const MatrixXd C_direct =
      fmap_from_pointmap(p.gt, p.P.basis.truncated(k), p.R.basis.truncated(k));
  const MatrixXc Q_direct = estimate_q_procrustes(C_direct, p.P, p.R);
  const double direct = cq_energy(C_direct, Q_direct, p.P, p.R);

  const auto copy = shapes::rigid_copy(shapes::mirrored(m), 4);
  const ShapeData P = make_shape_data(copy.mesh, 30, 30);
  const MatrixXd C_mirror =
      fmap_from_pointmap(copy.to_source, P.basis.truncated(k), p.R.basis.truncated(k));
  const MatrixXc Q_mirror = estimate_q_procrustes(C_mirror, P, p.R);
  const double mirrored = cq_energy(C_mirror, Q_mirror, P, p.R);
  RecordProperty("direct", std::to_string(direct));
  RecordProperty("mirrored", std::to_string(mirrored));
  EXPECT_GE(mirrored, 5.0 * direct);
  EXPECT_GT(mirrored, 1e-3 * C_mirror.squaredNorm());
}

}  // namespace
}  // namespace cfmaps
