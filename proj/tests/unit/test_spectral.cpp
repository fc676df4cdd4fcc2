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

#include <cfmaps/basis_cache.hpp>
#include <cfmaps/eigensolver.hpp>
#include <cfmaps/errors.hpp>
#include <cfmaps/spectral.hpp>
#include <cfmaps/tangent.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

namespace cfmaps {
namespace {

/// Largest principal angle (as sin) between the column spans of two
/// A-orthonormal bases.
template <class Mat>
double subspace_gap(const Mat& X, const Mat& Y, const VectorXd& mass) {
  const Mat P = X.adjoint() * mass.asDiagonal() * Y;
  Eigen::JacobiSVD<Mat> svd(P);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

/// Index ranges [begin, end) of clusters of eigenvalues closer than `tol`.
std::vector<std::pair<int, int>> clusters(const VectorXd& values, int k, double tol) {
  std::vector<std::pair<int, int>> out;
  int begin = 0;
  for (int i = 1; i <= k; ++i) {
    if (i == k || values[i] - values[i - 1] > tol * std::max(1.0, std::abs(values[i]))) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

TEST(Eigensolver, IterativeMatchesDenseOracleReal) {
  const TriMesh m = shapes::bumpy_sphere(3, 21);
  const SparseMatrixd& W = cotan_laplacian(m).matrix;
  const VectorXd mass = mass_matrix(m).diag;
  EigenOptions opt;
  opt.force_iterative = true;
  const int k = 24;
  const auto pairs = smallest_eigenpairs(W, mass, k, opt);
  const auto oracle = test::dense_generalized(W, mass);
  for (int i = 0; i < k; ++i) {
    EXPECT_NEAR(pairs.values[i], oracle.values[i], 1e-8 * std::max(1.0, oracle.values[i]));
    EXPECT_LT(pairs.residuals[i], 1e-10);
    EXPECT_LT(relative_residual(W, mass, pairs.values[i], pairs.vectors.col(i)), 1e-9);
  }
  const MatrixXd gram = pairs.vectors.transpose() * mass.asDiagonal() * pairs.vectors;
  EXPECT_LT((gram - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
  for (auto [b, e] : clusters(oracle.values, k, 1e-6)) {
    EXPECT_LT(subspace_gap<MatrixXd>(pairs.vectors.middleCols(b, e - b),
                                     oracle.vectors.middleCols(b, e - b), mass),
              1e-6);
  }
}

TEST(Eigensolver, IterativeMatchesDenseOracleComplex) {
  const TriMesh m = shapes::bumpy_sphere(3, 22);
  const SparseMatrixc& L = connection_laplacian(m, build_frames(m)).matrix;
  const VectorXd mass = mass_matrix(m).diag;
  EigenOptions opt;
  opt.force_iterative = true;
  const int k = 20;
  const auto pairs = smallest_eigenpairs(L, mass, k, opt);
  const auto oracle = test::dense_generalized(L, mass);
  for (int i = 0; i < k; ++i) {
    EXPECT_NEAR(pairs.values[i], oracle.values[i], 1e-8 * std::max(1.0, oracle.values[i]));
  }
  const MatrixXc gram = pairs.vectors.adjoint() * mass.asDiagonal() * pairs.vectors;
  EXPECT_LT((gram - MatrixXc::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
  for (auto [b, e] : clusters(oracle.values, k, 1e-6)) {
    EXPECT_LT(subspace_gap<MatrixXc>(pairs.vectors.middleCols(b, e - b),
                                     oracle.vectors.middleCols(b, e - b), mass),
              1e-6);
  }
}

TEST(Eigensolver, NonConvergenceCarriesProgress) {
  const TriMesh m = shapes::icosphere(3);
  EigenOptions opt;
  opt.force_iterative = true;
  opt.max_iterations = 1;
  opt.tolerance = 1e-15;
  try {
    smallest_eigenpairs(cotan_laplacian(m).matrix, mass_matrix(m).diag, 30, opt);
    FAIL() << "expected non-convergence";
  } catch (const EigenSolverError& e) {
    EXPECT_LT(e.converged(), 30);
    EXPECT_FALSE(e.residuals().empty());
  }
}

TEST(Eigensolver, Deterministic) {
  const TriMesh m = shapes::bumpy_sphere(3, 2);
  EigenOptions opt;
  opt.force_iterative = true;
  const auto a = smallest_eigenpairs(cotan_laplacian(m).matrix, mass_matrix(m).diag, 10, opt);
  const auto b = smallest_eigenpairs(cotan_laplacian(m).matrix, mass_matrix(m).diag, 10, opt);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(SpectralBasis, ConstantKernel) {
  const TriMesh m = shapes::bumpy_sphere(2, 4);
  const SpectralBasis b = eig_real(cotan_laplacian(m), mass_matrix(m), 1);
  EXPECT_LT(std::abs(b.lambda[0]), 1e-8);
  const double c = 1.0 / std::sqrt(m.total_area());
  EXPECT_LT((b.phi.col(0).cwiseAbs() - VectorXd::Constant(m.num_vertices(), c)).cwiseAbs().maxCoeff(),
            1e-8);
}

TEST(SpectralBasis, SphereFirstHarmonics) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(s.basis.lambda[i], 2.0, 0.1);
  // l = 2 band: l(l + 1) = 6.
  for (int i = 4; i < 9; ++i) EXPECT_NEAR(s.basis.lambda[i], 6.0, 0.3);
}

TEST(SpectralBasis, OrthonormalAndResidual) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  const int k = s.basis.size();
  const MatrixXd gram = s.basis.phi.transpose() * s.basis.mass.asDiagonal() * s.basis.phi;
  EXPECT_LT((gram - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
  for (int i = 0; i < k; ++i) {
    if (i > 0) EXPECT_GE(s.basis.lambda[i], s.basis.lambda[i - 1]);
    EXPECT_LT(relative_residual(s.laplacian.matrix, s.basis.mass, s.basis.lambda[i],
                                s.basis.phi.col(i)),
              1e-6);
  }
}

/// True when some entry tying the maximum magnitude (to solver precision) is
/// real and positive. Mirror-symmetric meshes have such ties with both signs.
template <typename V>
bool leading_entry_positive(const V& x) {
  const double m = x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Complex z(x[i]);
    if (std::abs(z) >= m * (1.0 - 1e-8) && z.real() > 0.0 && std::abs(z.imag()) < 1e-12) return true;
  }
  return false;
}

TEST(SpectralBasis, SignConvention) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  for (int i = 0; i < s.basis.size(); ++i) {
    EXPECT_TRUE(leading_entry_positive(s.basis.phi.col(i))) << "phi " << i;
  }
  for (int i = 0; i < s.complex_basis.size(); ++i) {
    EXPECT_TRUE(leading_entry_positive(s.complex_basis.psi.col(i))) << "psi " << i;
  }
  // Without symmetric ties the choice is unique.
  const ShapeData& b = test::cached_shape("bumpy2", [] { return shapes::bumpy_sphere(2, 21); }, 20, 20);
  for (int i = 0; i < b.basis.size(); ++i) {
    Eigen::Index idx;
    b.basis.phi.col(i).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(b.basis.phi(idx, i), 0.0) << "phi " << i;
  }
}

TEST(ComplexSpectralBasis, OrthonormalRealValuesHairyBall) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  const int k = s.complex_basis.size();
  const MatrixXc gram = s.complex_basis.psi.adjoint() * s.complex_basis.mass.asDiagonal() *
                        s.complex_basis.psi;
  EXPECT_LT((gram - MatrixXc::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
  // Rayleigh quotients of a Hermitian pencil are real.
  const MatrixXc rq = s.complex_basis.psi.adjoint() * s.connection.matrix * s.complex_basis.psi;
  for (int i = 0; i < k; ++i) {
    EXPECT_LT(std::abs(rq(i, i).imag()), 1e-8);
    EXPECT_NEAR(rq(i, i).real(), s.complex_basis.lambda[i], 1e-8 * std::max(1.0, rq(i, i).real()));
    if (i > 0) EXPECT_GE(std::abs(s.complex_basis.lambda[i]), std::abs(s.complex_basis.lambda[i - 1]));
  }
  EXPECT_GT(s.complex_basis.lambda[0], 0.1);
}

TEST(SpectralBasis, RigidMotionInvariance) {
  const TriMesh m = shapes::bumpy_sphere(2, 31);
  const auto copy = shapes::rigid_copy(m, 4);
  const auto a = compute_basis_bundle(m, 20);
  const auto b = compute_basis_bundle(copy.mesh, 20);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(a.real.lambda[i], b.real.lambda[i], 1e-8 * std::max(1.0, a.real.lambda[i]));
    EXPECT_NEAR(a.complex.lambda[i], b.complex.lambda[i],
                1e-8 * std::max(1.0, a.complex.lambda[i]));
  }
}

TEST(SpectralBasis, RefinementStability) {
  const auto& l3 = test::sphere_shape(3, 50, 50);
  const TriMesh m4 = shapes::icosphere(4);
  const SpectralBasis l4 = eig_real(cotan_laplacian(m4), mass_matrix(m4), 11);
  for (int i = 1; i <= 10; ++i) {
    EXPECT_NEAR(l4.lambda[i], l3.basis.lambda[i], 0.05 * l3.basis.lambda[i]);
  }
}

TEST(SpectralBasis, TruncationAndProjection) {
  const ShapeData& s = test::sphere_shape(3, 50, 50);
  const SpectralBasis t = s.basis.truncated(10);
  EXPECT_EQ(t.size(), 10);
  EXPECT_EQ(t.phi, s.basis.phi.leftCols(10));
  const VectorXd c = test::random_vector(10, 1);
  EXPECT_LT((t.project(t.reconstruct(c)) - c).norm(), 1e-10);
  EXPECT_THROW(s.basis.truncated(51), InvalidArgument);
}

class BasisCacheTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = test::scratch_dir("basis-cache"); }
  std::filesystem::path dir_;
};

TEST_F(BasisCacheTest, RoundTripAndWarmHit) {
  const TriMesh m = shapes::bumpy_sphere(2, 13);
  BasisCache cache(dir_);
  bool hit = true;
  const BasisBundle a = cache.get(m, 20, &hit);
  EXPECT_FALSE(hit);
  const auto file = cache.path_for(mesh_content_hash(m));
  ASSERT_TRUE(std::filesystem::exists(file));
  const auto stamp = std::filesystem::last_write_time(file);
  const BasisBundle b = cache.get(m, 20, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(std::filesystem::last_write_time(file), stamp);
  EXPECT_EQ(a.real.phi, b.real.phi);
  EXPECT_EQ(a.real.lambda, b.real.lambda);
  EXPECT_EQ(a.complex.psi, b.complex.psi);
  EXPECT_EQ(a.real.mass, b.real.mass);
}

TEST_F(BasisCacheTest, LargerCacheServesSmallerRequests) {
  const TriMesh m = shapes::bumpy_sphere(2, 14);
  BasisCache cache(dir_);
  const BasisBundle full = cache.get(m, 50);
  bool hit = false;
  const BasisBundle part = cache.get(m, 12, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(part.real.size(), 12);
  EXPECT_EQ(part.complex.size(), 12);
  EXPECT_EQ(part.real.phi, full.real.phi.leftCols(12));
  EXPECT_EQ(part.complex.psi, full.complex.psi.leftCols(12));
}

TEST_F(BasisCacheTest, CorruptFileIsRecomputedWithWarning) {
  const TriMesh m = shapes::bumpy_sphere(2, 15);
  BasisCache cache(dir_);
  const BasisBundle a = cache.get(m, 10);
  const auto file = cache.path_for(mesh_content_hash(m));
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    f.put('\x5a');
  }
  ScopedWarningCapture capture;
  bool hit = true;
  const BasisBundle b = cache.get(m, 10, &hit);
  EXPECT_FALSE(hit);
  EXPECT_TRUE(capture.contains("corrupt_cache"));
  EXPECT_EQ(a.real.lambda, b.real.lambda);
  EXPECT_TRUE(read_basis_bundle(file, mesh_content_hash(m), 10).has_value());
}

TEST_F(BasisCacheTest, HashChangesWithGeometry) {
  const TriMesh a = shapes::icosphere(1);
  const TriMesh b = shapes::linearly_transformed(a, 1.000001 * Eigen::Matrix3d::Identity());
  EXPECT_NE(mesh_content_hash(a), mesh_content_hash(b));
  EXPECT_EQ(mesh_content_hash(a), mesh_content_hash(shapes::icosphere(1)));
  EXPECT_EQ(mesh_content_hash(a).size(), 64u);
}

}  // namespace
}  // namespace cfmaps
