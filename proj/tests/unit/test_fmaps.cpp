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
#include <cfmaps/conversion.hpp>
#include <cfmaps/fmaps.hpp>
#include <cfmaps/tangent.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace cfmaps {
namespace {

double a_norm(const VectorXd& f, const VectorXd& mass) {
  return std::sqrt(f.cwiseAbs2().dot(mass));
}

/// Vertex permutation induced by a rotation that maps the icosphere to itself.
PointMap symmetry_permutation(const TriMesh& m, const Eigen::Matrix3d& R) {
  PointMap perm(m.num_vertices(), -1);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec3 target = R * m.position(v);
    for (int w = 0; w < m.num_vertices(); ++w) {
      if ((m.position(w) - target).norm() < 1e-9) perm[v] = w;
    }
  }
  return perm;
}

TEST(Wks, NeedsTwoEigenpairs) {
  const ShapeData& s = test::sphere_shape(2, 20, 20);
  EXPECT_THROW(wks_descriptors(s.basis.truncated(1)), InvalidArgument);
}

TEST(Wks, ShapeAndNormalization) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  const DescriptorSet d = wks_descriptors(s.basis, {50, 6.0});
  EXPECT_EQ(d.values.rows(), s.num_vertices());
  EXPECT_EQ(d.values.cols(), 50);
  EXPECT_EQ(d.kind, "wks");
  ASSERT_EQ(d.energies.size(), 50);
  EXPECT_NEAR(d.energies[0], std::log(s.basis.lambda[1]), 1e-12);
  EXPECT_NEAR(d.energies[49], std::log(s.basis.lambda[39]), 1e-12);
  for (int j = 0; j < 50; ++j) {
    EXPECT_NEAR(a_norm(d.values.col(j), s.mass.diag), 1.0, 1e-10);
    EXPECT_TRUE(d.values.col(j).allFinite());
  }
}

TEST(Wks, RigidMotionInvariance) {
  const TriMesh m = shapes::bumpy_sphere(2, 6);
  const auto copy = shapes::rigid_copy(m, 3);
  const ShapeData a = make_shape_data(m, 30, 2);
  const ShapeData b = make_shape_data(copy.mesh, 30, 2);
  const MatrixXd da = wks_descriptors(a.basis).values, db = wks_descriptors(b.basis).values;
  double err = 0.0;
  for (int t = 0; t < copy.mesh.num_vertices(); ++t) {
    err = std::max(err, (db.row(t) - da.row(copy.to_source[t])).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(err, 1e-8 * da.cwiseAbs().maxCoeff());
}

TEST(Wks, MirrorBlind) {
  const TriMesh m = shapes::bumpy_sphere(2, 7);
  const ShapeData a = make_shape_data(m, 30, 2);
  const ShapeData b = make_shape_data(shapes::mirrored(m), 30, 2);
  const MatrixXd da = wks_descriptors(a.basis).values, db = wks_descriptors(b.basis).values;
  EXPECT_LT((da - db).cwiseAbs().maxCoeff(), 1e-8 * da.cwiseAbs().maxCoeff());
}

TEST(Wks, BilateralSymmetryAmbiguity) {
  const auto blob = shapes::bilateral_blob(3, 1);
  const ShapeData s = make_shape_data(blob.mesh, 40, 2);
  const MatrixXd d = wks_descriptors(s.basis).values;
  double err = 0.0;
  for (int v = 0; v < s.num_vertices(); ++v) {
    err = std::max(err, (d.row(v) - d.row(blob.reflection[v])).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(err, 1e-6 * d.cwiseAbs().maxCoeff());
}

TEST(Wks, NearIsometricPairWithinFivePercent) {
  const TriMesh m = shapes::bumpy_sphere(3, 8);
  Eigen::Matrix3d stretch = Eigen::Vector3d(1.01, 1.0, 0.995).asDiagonal();
  const auto copy = shapes::rigid_copy(shapes::linearly_transformed(m, stretch), 5);
  const ShapeData a = make_shape_data(m, 40, 2);
  const ShapeData b = make_shape_data(copy.mesh, 40, 2);
  const MatrixXd da = wks_descriptors(a.basis).values, db = wks_descriptors(b.basis).values;
  for (int j = 0; j < da.cols(); ++j) {
    VectorXd pulled(a.num_vertices());
    for (int t = 0; t < b.num_vertices(); ++t) pulled[copy.to_source[t]] = db(t, j);
    EXPECT_LT(a_norm(pulled - da.col(j), a.mass.diag), 0.05 * a_norm(da.col(j), a.mass.diag))
        << "column " << j;
  }
}

TEST(FmapFromDescriptors, IdenticalShapesGiveIdentity) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  const SpectralBasis b = s.basis.truncated(20);
  const DescriptorSet d = wks_descriptors(s.basis, {50, 6.0});
  const MatrixXd C = fmap_from_descriptors(d, d, b, b);
  const MatrixXd off = C - MatrixXd(C.diagonal().asDiagonal());
  EXPECT_LT(off.norm(), 1e-3 * C.norm());
  EXPECT_LT((C - MatrixXd::Identity(20, 20)).norm(), 1e-3);
}

TEST(FmapFromDescriptors, RandomDescriptorsStayBounded) {
  const ShapeData& s = test::sphere_shape(2, 20, 20);
  DescriptorSet a{test::random_matrix(s.num_vertices(), 5, 1), "random", {}};
  DescriptorSet b{test::random_matrix(s.num_vertices(), 5, 2), "random", {}};
  const MatrixXd C = fmap_from_descriptors(a, b, s.basis, s.basis);
  EXPECT_TRUE(C.allFinite());
  EXPECT_LT(C.norm(), 1e6);
  DescriptorSet c{test::random_matrix(s.num_vertices(), 4, 3), "random", {}};
  EXPECT_THROW(fmap_from_descriptors(a, c, s.basis, s.basis), InvalidArgument);
}

TEST(FmapFromDescriptors, MatchesExplicitLeastSquares) {
  // Oracle: stack every residual of the energy as rows of a dense design
  // matrix over the entries of C and solve with QR.
  const ShapeData& P = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  const ShapeData& R = test::cached_shape("bumpy2-9", [] { return shapes::bumpy_sphere(2, 9); },
                                          40, 10);
  const int kp = 6, kr = 5, d = 3;
  const SpectralBasis bp = P.basis.truncated(kp), br = R.basis.truncated(kr);
  DescriptorSet dp{test::random_matrix(P.num_vertices(), d, 11).cwiseAbs(), "random", {}};
  DescriptorSet dr{test::random_matrix(R.num_vertices(), d, 12).cwiseAbs(), "random", {}};
  FmapWeights w;
  w.descriptor = 0.7;
  w.commutativity = 0.3;
  w.laplacian = 0.05;
  w.ridge = 1e-6;
  const MatrixXd C = fmap_from_descriptors(dp, dr, bp, br, w);

  const int nvar = kp * kr;
  auto unit = [&](int v) {
    MatrixXd E = MatrixXd::Zero(kp, kr);
    E(v % kp, v / kp) = 1.0;
    return E;
  };
  auto proj = [](const SpectralBasis& b, const VectorXd& f) { return b.project(f); };
  std::vector<MatrixXd> row_blocks;
  std::vector<VectorXd> rhs_blocks;
  for (int i = 0; i < d; ++i) {
    const VectorXd a = proj(br, dr.values.col(i)), b = proj(bp, dp.values.col(i));
    MatrixXd rows(kp, nvar);
    for (int v = 0; v < nvar; ++v) rows.col(v) = std::sqrt(w.descriptor) * unit(v) * a;
    row_blocks.push_back(rows);
    rhs_blocks.push_back(std::sqrt(w.descriptor) * b);
    const MatrixXd Gr = br.phi.transpose() * br.mass.cwiseProduct(dr.values.col(i)).asDiagonal() * br.phi;
    const MatrixXd Gp = bp.phi.transpose() * bp.mass.cwiseProduct(dp.values.col(i)).asDiagonal() * bp.phi;
    MatrixXd crow(kp * kr, nvar);
    for (int v = 0; v < nvar; ++v) {
      const MatrixXd res = std::sqrt(w.commutativity) * (unit(v) * Gr - Gp * unit(v));
      crow.col(v) = Eigen::Map<const VectorXd>(res.data(), kp * kr);
    }
    row_blocks.push_back(crow);
    rhs_blocks.push_back(VectorXd::Zero(kp * kr));
  }
  MatrixXd lrow(kp * kr, nvar);
  for (int v = 0; v < nvar; ++v) {
    const MatrixXd res = std::sqrt(w.laplacian) *
                         (unit(v) * br.lambda.asDiagonal() - bp.lambda.asDiagonal() * unit(v));
    lrow.col(v) = Eigen::Map<const VectorXd>(res.data(), kp * kr);
  }
  row_blocks.push_back(lrow);
  rhs_blocks.push_back(VectorXd::Zero(kp * kr));
  row_blocks.push_back(std::sqrt(w.ridge) * MatrixXd::Identity(nvar, nvar));
  rhs_blocks.push_back(VectorXd::Zero(nvar));

  Eigen::Index total = 0;
  for (const auto& b : row_blocks) total += b.rows();
  MatrixXd M(total, nvar);
  VectorXd y(total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < row_blocks.size(); ++i) {
    M.middleRows(at, row_blocks[i].rows()) = row_blocks[i];
    y.segment(at, row_blocks[i].rows()) = rhs_blocks[i];
    at += row_blocks[i].rows();
  }
  const VectorXd x = M.colPivHouseholderQr().solve(y);
  const MatrixXd oracle = Eigen::Map<const MatrixXd>(x.data(), kp, kr);
  EXPECT_LT((C - oracle).norm(), 1e-8 * oracle.norm());
}

TEST(FmapFromPointmap, IdentityIsIdentity) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  const MatrixXd C = fmap_from_pointmap(test::identity_map(s.num_vertices()), s.basis, s.basis);
  EXPECT_LT((C - MatrixXd::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FmapFromPointmap, SymmetryPermutationIsOrthonormal) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  const Eigen::Matrix3d R = Eigen::Vector3d(1, -1, -1).asDiagonal();
  const PointMap perm = symmetry_permutation(s.mesh, R);
  ASSERT_EQ(std::count(perm.begin(), perm.end(), -1), 0);
  for (int k : {16, 25}) {  // complete l-bands
    const SpectralBasis b = s.basis.truncated(k);
    const MatrixXd C = fmap_from_pointmap(perm, b, b);
    EXPECT_LT((C.transpose() * C - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(FmapFromPointmap, RoundTripIsIdempotent) {
  const TriMesh m = shapes::bumpy_sphere(2, 3);
  const auto copy = shapes::rigid_copy(m, 8);
  const ShapeData P = make_shape_data(copy.mesh, 30, 2);
  const ShapeData R = make_shape_data(m, 30, 2);
  const MatrixXd C1 = fmap_from_pointmap(copy.to_source, P.basis, R.basis);
  const PointMap m1 = pointmap_from_fmap(C1, P.basis, R.basis);
  const MatrixXd C2 = fmap_from_pointmap(m1, P.basis, R.basis);
  const PointMap m2 = pointmap_from_fmap(C2, P.basis, R.basis);
  EXPECT_EQ(m1, m2);
  EXPECT_EQ(m1, copy.to_source);
}

TEST(FmapFromPointmap, ProjectsThePullback) {
  const ShapeData& R = test::cached_shape("bumpy2-9", [] { return shapes::bumpy_sphere(2, 9); },
                                          40, 10);
  const ShapeData& P = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  // Nearest-position map between two different bumpy spheres.
  PointMap map(P.num_vertices());
  for (int p = 0; p < P.num_vertices(); ++p) {
    double best = 1e300;
    for (int r = 0; r < R.num_vertices(); ++r) {
      const double d = (P.mesh.position(p).normalized() - R.mesh.position(r).normalized()).norm();
      if (d < best) best = d, map[p] = r;
    }
  }
  const MatrixXd C = fmap_from_pointmap(map, P.basis, R.basis);
  double worst_trunc = 0.0;
  for (int s = 0; s < 5; ++s) {
    const VectorXd c = test::random_vector(R.k_real(), 40 + s);
    const VectorXd g = R.basis.reconstruct(c);
    VectorXd pulled(P.num_vertices());
    for (int p = 0; p < P.num_vertices(); ++p) pulled[p] = g[map[p]];
    const VectorXd direct = P.basis.project(pulled);
    EXPECT_LT((C * c - direct).norm(), 1e-8 * direct.norm());
    worst_trunc = std::max(worst_trunc, a_norm(P.basis.reconstruct(C * c) - pulled, P.mass.diag) /
                                            a_norm(pulled, P.mass.diag));
  }
  RecordProperty("truncation_error", std::to_string(worst_trunc));
}

TEST(FieldOperators, Duality) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  for (int t = 0; t < 10; ++t) {
    const VectorXc X = test::random_complex_vector(s.num_vertices(), 200 + t);
    const VectorXd f = test::random_vector(s.num_vertices(), 300 + t);
    const VectorXc dfx = df_operator(f, s.gradient).apply(X);
    const VectorXd dxf = dx_operator(X, s.gradient).apply(f);
    const double scale = dfx.cwiseAbs().maxCoeff();
    EXPECT_LT((dfx.real() - dxf).cwiseAbs().maxCoeff(), 1e-12 * scale);
    // The imaginary part is the pairing with the rotated field.
    const VectorXd dixf = dx_operator(Complex(0, 1) * X, s.gradient).apply(f);
    EXPECT_LT((dfx.imag() + dixf).cwiseAbs().maxCoeff(), 1e-12 * scale);
    const VectorXc dfix = df_operator(f, s.gradient).apply(Complex(0, 1) * X);
    EXPECT_LT((dfx.imag() + dfix.real()).cwiseAbs().maxCoeff(), 1e-12 * scale);
  }
}

TEST(FieldOperators, ZeroLinearAndLocal) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  const int n = s.num_vertices();
  const VectorFieldOperator Z = dx_operator(VectorXc::Zero(n), s.gradient);
  EXPECT_EQ(test::dense(Z.matrix).cwiseAbs().maxCoeff(), 0.0);
  const VectorXc X = test::random_complex_vector(n, 1), Y = test::random_complex_vector(n, 2);
  const MatrixXd lhs = test::dense(dx_operator(2.0 * X - 0.5 * Y, s.gradient).matrix);
  const MatrixXd rhs = 2.0 * test::dense(dx_operator(X, s.gradient).matrix) -
                       0.5 * test::dense(dx_operator(Y, s.gradient).matrix);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * rhs.cwiseAbs().maxCoeff());
  const SparseMatrixd& D = dx_operator(X, s.gradient).matrix;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SparseMatrixd::InnerIterator it(D, k); it; ++it) {
      EXPECT_TRUE(it.row() == it.col() ||
                  s.mesh.edge_index(static_cast<int>(it.row()), static_cast<int>(it.col())) >= 0);
    }
  }
}

TEST(FieldOperators, DirectionalDerivativeOnPlane) {
  const TriMesh m = shapes::grid(7, 7);
  Positions ref(m.num_vertices(), 3);
  for (int i = 0; i < m.num_vertices(); ++i) ref.row(i) = Vec3::UnitX().transpose();
  const VertexGradientOperator G = vertex_gradient(m, build_frames(m, ref));
  const VectorXd f = 3.0 * m.vertices().col(0) - 2.0 * m.vertices().col(1);
  const VectorXd d = dx_operator(VectorXc::Ones(m.num_vertices()), G).apply(f);
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_NEAR(d[v], 3.0, 1e-10);
}

TEST(FieldOperators, ReducedForms) {
  const ShapeData& s = test::cached_shape("bumpy2-5", [] { return shapes::bumpy_sphere(2, 5); },
                                          40, 10);
  const VectorXc X = s.complex_basis.psi.col(2);
  const VectorXd f = s.basis.phi.col(3);
  const MatrixXd rx = dx_operator(X, s.gradient).reduced(s.basis);
  const MatrixXd ex = s.basis.phi.transpose() * s.mass.diag.asDiagonal() *
                      test::dense(dx_operator(X, s.gradient).matrix) * s.basis.phi;
  EXPECT_LT((rx - ex).cwiseAbs().maxCoeff(), 1e-10);
  const MatrixXc rf = df_operator(f, s.gradient).reduced(s.basis, s.complex_basis);
  const MatrixXc ef = s.basis.phi.transpose().cast<Complex>() * s.mass.diag.asDiagonal() *
                      (s.gradient.apply(f).conjugate().asDiagonal() * s.complex_basis.psi);
  EXPECT_LT((rf - ef).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
}  // namespace cfmaps
