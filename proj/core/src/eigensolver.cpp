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

#include "cfmaps/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace cfmaps {

namespace {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar>;

template <typename Scalar>
Scalar random_scalar(std::mt19937_64& rng, std::normal_distribution<double>& d) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return d(rng);
  } else {
    const double re = d(rng);
    return Scalar(re, d(rng));
  }
}

template <typename Scalar>
double inf_norm(const Sparse<Scalar>& K) {
  VectorXd rows = VectorXd::Zero(K.rows());
  for (int c = 0; c < K.outerSize(); ++c) {
    for (typename Sparse<Scalar>::InnerIterator it(K, c); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

template <typename Scalar>
double residual_of(const Sparse<Scalar>& K, const VectorXd& mass, double knorm, double lambda,
                   const Vec<Scalar>& x) {
  const Vec<Scalar> r = K * x - (lambda * mass.array()).matrix().cast<Scalar>().asDiagonal() * x;
  const double denom = std::max(knorm, 1e-300) * std::max(x.norm(), 1e-300);
  return r.norm() / denom;
}

/// Largest-magnitude entry made real positive.
template <typename Scalar>
void fix_phase(Eigen::Ref<Vec<Scalar>> x) {
  Eigen::Index idx = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Prefer the first index among entries that tie to rounding.
    if (std::abs(x[i]) > best * (1.0 + 1e-12)) {
      best = std::abs(x[i]);
      idx = i;
    }
  }
  if (best <= 0.0) return;
  if constexpr (std::is_same_v<Scalar, double>) {
    if (x[idx] < 0) x = -x;
  } else {
    x *= std::conj(x[idx]) / std::abs(x[idx]);
  }
}

template <typename Scalar>
EigenPairs<Scalar> dense_solve(const Sparse<Scalar>& K, const VectorXd& mass, int k) {
  const VectorXd isq = mass.cwiseSqrt().cwiseInverse();
  Mat<Scalar> Kd = Mat<Scalar>(K);
  Mat<Scalar> M = isq.cast<Scalar>().asDiagonal() * Kd * isq.cast<Scalar>().asDiagonal();
  M = (0.5 * (M + M.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(M);
  if (es.info() != Eigen::Success) {
    throw EigenSolverError("dense eigensolver failed", 0, {});
  }
  EigenPairs<Scalar> out;
  out.values = es.eigenvalues().head(k);
  out.vectors = isq.cast<Scalar>().asDiagonal() * es.eigenvectors().leftCols(k);
  return out;
}

template <typename Scalar>
class ShiftInvert {
 public:
  ShiftInvert(const Sparse<Scalar>& K, const VectorXd& mass, double sigma) {
    Sparse<Scalar> shifted = K;
    for (int i = 0; i < K.rows(); ++i) shifted.coeffRef(i, i) -= Scalar(sigma * mass[i]);
    shifted.makeCompressed();
    ldlt_.compute(shifted);
    if (ldlt_.info() != Eigen::Success) {
      use_lu_ = true;
      lu_.compute(shifted);
      if (lu_.info() != Eigen::Success) {
        throw EigenSolverError("factorization of the shifted operator failed", 0, {});
      }
    }
  }

  Vec<Scalar> solve(const Vec<Scalar>& b) const {
    return use_lu_ ? Vec<Scalar>(lu_.solve(b)) : Vec<Scalar>(ldlt_.solve(b));
  }

 private:
  Eigen::SimplicialLDLT<Sparse<Scalar>> ldlt_;
  Eigen::SparseLU<Sparse<Scalar>> lu_;
  bool use_lu_ = false;
};

/// A-orthogonalizes w against the first `m` columns of V (two passes) and
/// normalizes it. Returns false when w is numerically dependent.
template <typename Scalar>
bool orthonormalize(const Mat<Scalar>& V, Eigen::Index m, const VectorXd& mass,
                    Vec<Scalar>& w) {
  auto anorm = [&](const Vec<Scalar>& x) {
    return std::sqrt((x.array().abs2() * mass.array()).sum());
  };
  const double before = anorm(w);
  if (!(before > 0.0)) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (m == 0) break;
    const Vec<Scalar> aw = mass.cast<Scalar>().asDiagonal() * w;
    const Vec<Scalar> coef = V.leftCols(m).adjoint() * aw;
    w -= V.leftCols(m) * coef;
  }
  const double after = anorm(w);
  if (!(after > 1e-10 * before)) return false;
  w /= after;
  return true;
}

template <typename Scalar>
EigenPairs<Scalar> iterative_solve(const Sparse<Scalar>& K, const VectorXd& mass, int k,
                                   const EigenOptions& opt) {
  const Eigen::Index n = K.rows();
  const double knorm = inf_norm(K);
  const double sigma = -1e-8 * mass.sum();
  const ShiftInvert<Scalar> op(K, mass, sigma);
  const int block = std::max(1, opt.block_size);
  const Eigen::Index max_basis = std::min<Eigen::Index>(n, 3 * k + 2 * block);
  const Eigen::Index keep = std::min<Eigen::Index>(n, k + block);

  Mat<Scalar> V(n, max_basis);
  Mat<Scalar> KV(n, max_basis);
  Mat<Scalar> H = Mat<Scalar>::Zero(max_basis, max_basis);
  Eigen::Index m = 0;

  auto append = [&](Vec<Scalar> w) {
    if (m >= max_basis) return false;
    if (!orthonormalize(V, m, mass, w)) return false;
    V.col(m) = w;
    KV.col(m) = K * w;
    const Vec<Scalar> h = V.leftCols(m + 1).adjoint() * KV.col(m);
    H.col(m).head(m + 1) = h;
    H.row(m).head(m + 1) = h.adjoint();
    H(m, m) = Scalar(std::real(h[m]));
    ++m;
    return true;
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  const int initial = std::max<int>(block, std::min<Eigen::Index>(k, max_basis));
  for (int j = 0; j < initial; ++j) {
    Vec<Scalar> x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = random_scalar<Scalar>(rng, normal);
    append(op.solve(mass.cast<Scalar>().asDiagonal() * x));
  }

  std::vector<double> residuals(k, 0.0);
  int converged = 0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (m < k) {
      throw EigenSolverError("search space collapsed below the requested count", 0, {});
    }
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(H.topLeftCorner(m, m));
    const VectorXd theta = es.eigenvalues();
    const Mat<Scalar>& Y = es.eigenvectors();
    const Eigen::Index wanted = std::min<Eigen::Index>(m, keep);
    const Mat<Scalar> X = V.leftCols(m) * Y.leftCols(wanted);
    const Mat<Scalar> KX = KV.leftCols(m) * Y.leftCols(wanted);

    std::vector<Eigen::Index> pending;
    converged = 0;
    for (Eigen::Index j = 0; j < wanted; ++j) {
      const Vec<Scalar> r =
          KX.col(j) - (theta[j] * mass.array()).matrix().cast<Scalar>().asDiagonal() * X.col(j);
      const double res = r.norm() / (std::max(knorm, 1e-300) * X.col(j).norm());
      if (j < k) {
        residuals[j] = res;
        if (res < opt.tolerance) ++converged;
      }
      if (res >= opt.tolerance) pending.push_back(j);
    }
    if (converged == k) {
      EigenPairs<Scalar> out;
      out.values = theta.head(k);
      out.vectors = X.leftCols(k);
      return out;
    }

    if (m + block > max_basis) {
      // Thick restart onto the leading Ritz vectors.
      const Mat<Scalar> Vk = X.leftCols(keep);
      const Mat<Scalar> KVk = KX.leftCols(keep);
      V.leftCols(keep) = Vk;
      KV.leftCols(keep) = KVk;
      H.setZero();
      for (Eigen::Index j = 0; j < keep; ++j) H(j, j) = Scalar(theta[j]);
      m = keep;
    }

    int added = 0;
    for (Eigen::Index j : pending) {
      if (added >= block) break;
      if (append(op.solve(mass.cast<Scalar>().asDiagonal() * X.col(j)))) ++added;
    }
    if (added == 0) {
      // Stagnation: inject fresh random directions.
      for (int j = 0; j < block; ++j) {
        Vec<Scalar> x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = random_scalar<Scalar>(rng, normal);
        if (append(op.solve(mass.cast<Scalar>().asDiagonal() * x))) ++added;
      }
      if (added == 0 && m == n) continue;
      if (added == 0) break;
    }
  }
  std::ostringstream os;
  os << "eigensolver reached its iteration limit with " << converged << " of " << k
     << " eigenpairs converged";
  throw EigenSolverError(os.str(), converged, residuals);
}

template <typename Scalar>
EigenPairs<Scalar> solve(const Sparse<Scalar>& K, const VectorXd& mass, int k,
                         const EigenOptions& opt) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || mass.size() != n) {
    throw InvalidArgument("operator and mass sizes disagree");
  }
  if (k < 1 || k > n) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenpairs from a pencil of size " +
                          std::to_string(n));
  }
  if (!(mass.minCoeff() > 0.0)) {
    throw InvalidArgument("mass matrix must be strictly positive");
  }
  const bool dense = !opt.force_iterative && (n <= opt.dense_threshold || 3 * k >= n);
  EigenPairs<Scalar> out = dense ? dense_solve(K, mass, k) : iterative_solve(K, mass, k, opt);
  const double knorm = inf_norm(K);
  out.residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    fix_phase<Scalar>(out.vectors.col(j));
    out.residuals[j] = residual_of(K, mass, knorm, out.values[j], Vec<Scalar>(out.vectors.col(j)));
  }
  return out;
}

}  // namespace

EigenPairs<double> smallest_eigenpairs(const SparseMatrixd& K, const VectorXd& mass, int k,
                                       const EigenOptions& options) {
  return solve<double>(K, mass, k, options);
}

EigenPairs<Complex> smallest_eigenpairs(const SparseMatrixc& K, const VectorXd& mass, int k,
                                        const EigenOptions& options) {
  return solve<Complex>(K, mass, k, options);
}

double relative_residual(const SparseMatrixd& K, const VectorXd& mass, double lambda,
                         const VectorXd& x) {
  return residual_of<double>(K, mass, inf_norm(K), lambda, x);
}

double relative_residual(const SparseMatrixc& K, const VectorXd& mass, double lambda,
                         const VectorXc& x) {
  return residual_of<Complex>(K, mass, inf_norm(K), lambda, x);
}

}  // namespace cfmaps
