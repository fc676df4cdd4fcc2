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

#include <cfmaps/conversion.hpp>
#include <cfmaps/errors.hpp>
#include <cfmaps/evaluation.hpp>
#include <cfmaps/fmaps.hpp>
#include <cfmaps/nearest_neighbor.hpp>
#include <cfmaps/qmaps.hpp>
#include <cfmaps/transfer.hpp>

#include <gtest/gtest.h>

#include <fstream>

namespace cfmaps {
namespace {

struct RigidPair {
  ShapeData P, R;
  PointMap gt;
};

const RigidPair& rigid_pair() {
  static const RigidPair pair = [] {
    const TriMesh m = shapes::bumpy_sphere(3, 31);
    const auto copy = shapes::rigid_copy(m, 6);
    return RigidPair{make_shape_data(copy.mesh, 50, 50), make_shape_data(m, 50, 50),
                     copy.to_source};
  }();
  return pair;
}

TEST(PointmapFromFmap, IdentityOnSameMesh) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          30, 2);
  EXPECT_EQ(pointmap_from_fmap(MatrixXd::Identity(30, 30), s.basis, s.basis),
            test::identity_map(s.num_vertices()));
}

TEST(PointmapFromFmap, RecoversPermutationOnIcosphere) {
  const TriMesh m = shapes::icosphere(3);
  const auto copy = shapes::rigid_copy(m, 17);
  const ShapeData P = make_shape_data(copy.mesh, 25, 2);
  const ShapeData& R = test::sphere_shape(3, 25, 2);
  const MatrixXd C = fmap_from_pointmap(copy.to_source, P.basis, R.basis);
  EXPECT_EQ(pointmap_from_fmap(C, P.basis, R.basis), copy.to_source);
  EXPECT_THROW(pointmap_from_fmap(MatrixXd::Identity(30, 30), P.basis, R.basis), InvalidArgument);
}

TEST(PointmapFromQ, IdentityOnSameMesh) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          30, 30);
  EXPECT_EQ(pointmap_from_q(MatrixXc::Identity(30, 30), s, s),
            test::identity_map(s.num_vertices()));
  EXPECT_THROW(pointmap_from_q(MatrixXc::Identity(31, 31), s, s), InvalidArgument);
}

TEST(PointmapFromQ, RigidPairWithExactQ) {
  const RigidPair& p = rigid_pair();
  const MatrixXc Q = q_closed_form(p.gt, p.P, p.R).Q;
  const PointMap map = pointmap_from_q(Q, p.P, p.R);
  const double hit = test::fraction_equal(map, p.gt);
  RecordProperty("fraction_correct", std::to_string(hit));
  EXPECT_GE(hit, 0.99);
}

TEST(PointmapFromQ, GaugeConsistency) {
  const RigidPair& p = rigid_pair();
  const int k = 30;
  const MatrixXc Q = q_closed_form(p.gt, p.P, p.R).Q.topLeftCorner(k, k);
  ShapeData P = p.P, R = p.R;
  VectorXc dp(P.k_complex()), dr(R.k_complex());
  for (int j = 0; j < dp.size(); ++j) dp[j] = std::polar(1.0, 0.37 * j + 0.1);
  for (int j = 0; j < dr.size(); ++j) dr[j] = std::polar(1.0, -1.3 * j + 2.0);
  P.complex_basis.psi = P.complex_basis.psi * dp.asDiagonal();
  P.div_psi = P.div_psi * dp.asDiagonal();
  R.complex_basis.psi = R.complex_basis.psi * dr.asDiagonal();
  R.div_psi = R.div_psi * dr.asDiagonal();
  const MatrixXc Q2 = dp.head(k).conjugate().asDiagonal() * Q * dr.head(k).asDiagonal();
  const MatrixXd e1 = flatten_complex(p.P.div_psi.leftCols(k) * Q);
  const MatrixXd e2 = flatten_complex(P.div_psi.leftCols(k) * Q2);
  // Each (Re, Im) column pair is rotated rigidly, so row distances agree.
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double a = (e1.row(i) - flatten_complex(p.R.div_psi.leftCols(k)).row(j)).norm();
      const double b = (e2.row(i) - flatten_complex(R.div_psi.leftCols(k)).row(j)).norm();
      EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, a));
    }
  }
  EXPECT_EQ(pointmap_from_q(Q, p.P, p.R), pointmap_from_q(Q2, P, R));
}

TEST(PointmapFromQ, ResolvesSymmetricAmbiguity) {
  const auto pair = test::symmetric_pair(3, 4, 30, 30);
  const int k = 20;
  const SpectralBasis bp = pair.P.basis.truncated(k), br = pair.R.basis.truncated(k);
  const MatrixXd C_sym = fmap_from_pointmap(pair.sym_gt, bp, br);
  const MatrixXd C = make_noisy_fmap(fmap_from_pointmap(pair.gt, bp, br),
                                     {NoiseKind::symmetric, 0.5, 0}, &C_sym);
  const PointMap map_c = pointmap_from_fmap(C, bp, br);
  const PointMap map_q = pointmap_from_q(estimate_q_procrustes(C, pair.P, pair.R), pair.P, pair.R);
  const GeodesicGraph graph(pair.R.mesh);
  const double flip_c = flip_rate(map_c, pair.gt, pair.reflection, graph);
  const double flip_q = flip_rate(map_q, pair.gt, pair.reflection, graph);
  RecordProperty("flip_fmap", std::to_string(flip_c));
  RecordProperty("flip_q", std::to_string(flip_q));
  EXPECT_LT(flip_q, flip_c);
}

TEST(Icp, ExactMapIsAFixedPoint) {
  const RigidPair& p = rigid_pair();
  const int k = 30;
  const SpectralBasis bp = p.P.basis.truncated(k), br = p.R.basis.truncated(k);
  const MatrixXd C = fmap_from_pointmap(p.gt, bp, br);
  const IcpResult r = icp_refine(C, bp, br, 3);
  EXPECT_EQ(r.map, p.gt);
  EXPECT_EQ(r.residuals.size(), 3U);
  EXPECT_LT((r.C - C).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Icp, ResidualNeverIncreases) {
  const RigidPair& p = rigid_pair();
  const int k = 20;
  const SpectralBasis bp = p.P.basis.truncated(k), br = p.R.basis.truncated(k);
  for (int seed = 0; seed < 3; ++seed) {
    const MatrixXd C = fmap_from_pointmap(p.gt, bp, br) + 0.3 * test::random_matrix(k, k, seed);
    const IcpResult r = icp_refine(C, bp, br, 10);
    ASSERT_EQ(r.residuals.size(), 10U);
    for (std::size_t i = 1; i < r.residuals.size(); ++i) {
      EXPECT_LE(r.residuals[i], r.residuals[i - 1] * (1 + 1e-12));
    }
    EXPECT_NEAR(r.residuals.back(), embedding_residual(r.C, r.map, bp, br), 1e-12);
  }
  EXPECT_THROW(icp_refine(MatrixXd::Identity(4, 5), bp, br, 1), InvalidArgument);
}

TEST(NearestNeighbor, TreeMatchesBruteForce) {
  for (int dim : {3, 6, 20}) {
    const MatrixXd points = test::random_matrix(1800, dim, dim);
    const MatrixXd queries = test::random_matrix(500, dim, dim + 100);
    const NearestNeighborIndex index(points);
    EXPECT_TRUE(index.uses_tree());
    EXPECT_EQ(index.query(queries), brute_force_nearest(points, queries));
    EXPECT_EQ(nearest_neighbors(points, queries), brute_force_nearest(points, queries));
    for (int i = 0; i < 10; ++i) EXPECT_EQ(index.nearest(points.row(i).transpose()), i);
  }
}

TEST(NearestNeighbor, TiesResolveToLowestIndex) {
  MatrixXd points(4, 2);
  points << 1, 0, -1, 0, 0, 1, 1, 0;
  MatrixXd queries(2, 2);
  queries << 0, 0, 1, 0;
  EXPECT_EQ(brute_force_nearest(points, queries), (std::vector<int>{0, 0}));
  // Duplicate every point many times to force the tree path.
  MatrixXd many = points.replicate(400, 1);
  const NearestNeighborIndex index(many);
  ASSERT_TRUE(index.uses_tree());
  EXPECT_EQ(index.query(queries), (std::vector<int>{0, 0}));
  EXPECT_EQ(index.nearest(Eigen::Vector2d(0, 1)), 2);
  EXPECT_THROW(index.nearest(Eigen::Vector3d(0, 0, 0)), InvalidArgument);
  EXPECT_FALSE(NearestNeighborIndex(points).uses_tree());
}

TEST(Conversion, FlattenAndPolarFactor) {
  MatrixXc m(1, 2);
  m << Complex(1, 2), Complex(3, 4);
  MatrixXd expected(1, 4);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(flatten_complex(m), expected);
  const MatrixXd O = orthogonal_projection(test::random_matrix(8, 8, 3));
  EXPECT_LT((O.transpose() * O - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
  const MatrixXd Q = orthogonal_projection(MatrixXd::Identity(5, 5) * 3.0);
  EXPECT_LT((Q - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PointmapIo, RoundTripAndErrors) {
  const auto dir = test::scratch_dir("pointmap-io");
  const PointMap map{3, 0, 2, 2, 1};
  save_pointmap(dir / "a.map", map);
  EXPECT_EQ(load_pointmap(dir / "a.map"), map);
  {
    std::ofstream f(dir / "comments.map");
    f << "# header\n4\n\n 5 \n";
  }
  EXPECT_EQ(load_pointmap(dir / "comments.map"), (PointMap{4, 5}));
  {
    std::ofstream f(dir / "bad.map");
    f << "1\n2\n-3\n";
  }
  try {
    load_pointmap(dir / "bad.map");
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3U);
  }
  EXPECT_THROW(load_pointmap(dir / "missing.map"), Error);
}

TEST(PointmapIo, ColourExport) {
  const auto dir = test::scratch_dir("pointmap-colors");
  const TriMesh m = shapes::icosphere(1);
  const PointMap id = test::identity_map(m.num_vertices());
  save_pointmap_colors(dir / "map.ply", m, m, id);
  save_pointmap_colors(dir / "map.vtk", m, m, id);
  std::ifstream ply(dir / "map.ply"), vtk(dir / "map.vtk");
  const std::string a((std::istreambuf_iterator<char>(ply)), {});
  const std::string b((std::istreambuf_iterator<char>(vtk)), {});
  EXPECT_NE(a.find("property uchar red"), std::string::npos);
  EXPECT_NE(b.find("image_x"), std::string::npos);
  EXPECT_THROW(save_pointmap_colors(dir / "x.ply", m, m, PointMap{0}), InvalidArgument);
}

}  // namespace
}  // namespace cfmaps
