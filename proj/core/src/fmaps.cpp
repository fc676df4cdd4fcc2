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

#include "cfmaps/fmaps.hpp"

#include "cfmaps/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cfmaps {

DescriptorSet wks_descriptors(const SpectralBasis& basis, const WksOptions& options) {
  const int k = basis.size();
  if (k < 2) throw InvalidArgument("wave kernel signatures need at least 2 eigenpairs");
  if (options.count < 1) throw InvalidArgument("descriptor count must be positive");
  std::vector<int> used;
  for (int l = 1; l < k; ++l) {
    if (basis.lambda[l] > 0.0) used.push_back(l);
  }
  if (used.empty()) throw InvalidArgument("no positive eigenvalues for wave kernel signatures");
  const double lo = std::log(basis.lambda[used.front()]);
  const double hi = std::log(basis.lambda[used.back()]);
  const int d = options.count;
  const double step = d > 1 ? (hi - lo) / (d - 1) : 1.0;
  const double sigma = options.variance * (step > 0 ? step : 1.0);

  DescriptorSet out;
  out.kind = "wks";
  out.energies = VectorXd::LinSpaced(d, lo, d > 1 ? hi : lo);
  out.values = MatrixXd::Zero(basis.num_vertices(), d);
  const MatrixXd phi2 = basis.phi.array().square();
  for (int j = 0; j < d; ++j) {
    VectorXd w = VectorXd::Zero(k);
    double total = 0.0;
    for (int l : used) {
      const double t = out.energies[j] - std::log(basis.lambda[l]);
      w[l] = std::exp(-t * t / (2.0 * sigma * sigma));
      total += w[l];
    }
    VectorXd col = phi2 * (w / std::max(total, 1e-300));
    const double norm = std::sqrt(col.cwiseProduct(basis.mass).dot(col));
    if (norm > 0) col /= norm;
    out.values.col(j) = col;
  }
  return out;
}

MatrixXd fmap_from_descriptors(const DescriptorSet& source, const DescriptorSet& target,
                               const SpectralBasis& source_basis,
                               const SpectralBasis& target_basis, const FmapWeights& weights) {
  const int d = static_cast<int>(source.values.cols());
  if (target.values.cols() != d) {
    throw InvalidArgument("descriptor counts differ between the two shapes");
  }
  if (source.values.rows() != source_basis.num_vertices() ||
      target.values.rows() != target_basis.num_vertices()) {
    throw InvalidArgument("descriptor rows do not match the basis");
  }
  const int kp = source_basis.size();
  const int kr = target_basis.size();
  const int nvar = kp * kr;
  const MatrixXd& phip = source_basis.phi;
  const MatrixXd& phir = target_basis.phi;
  const MatrixXd P = phip.transpose() * source_basis.mass.asDiagonal() * source.values;
  const MatrixXd R = phir.transpose() * target_basis.mass.asDiagonal() * target.values;

  // Normal equations over vec(C), column-major: index a + kp * b for C(a, b).
  MatrixXd M = MatrixXd::Zero(nvar, nvar);
  VectorXd rhs = VectorXd::Zero(nvar);
  const MatrixXd Ip = MatrixXd::Identity(kp, kp);
  const MatrixXd Ir = MatrixXd::Identity(kr, kr);
  auto add_kron = [&](const MatrixXd& X, const MatrixXd& Y, double s) {
    for (int b = 0; b < X.rows(); ++b) {
      for (int c = 0; c < X.cols(); ++c) {
        if (X(b, c) == 0.0) continue;
        M.block(b * kp, c * kp, kp, kp) += (s * X(b, c)) * Y;
      }
    }
  };

  if (weights.descriptor > 0) {
    add_kron(R * R.transpose(), Ip, weights.descriptor);
    const MatrixXd PR = P * R.transpose();
    rhs += weights.descriptor * Eigen::Map<const VectorXd>(PR.data(), nvar);
  }
  if (weights.commutativity > 0) {
    MatrixXd sum_r2 = MatrixXd::Zero(kr, kr);
    MatrixXd sum_p2 = MatrixXd::Zero(kp, kp);
    for (int i = 0; i < d; ++i) {
      const MatrixXd Gp =
          phip.transpose() *
          (source_basis.mass.cwiseProduct(source.values.col(i))).asDiagonal() * phip;
      const MatrixXd Gr =
          phir.transpose() *
          (target_basis.mass.cwiseProduct(target.values.col(i))).asDiagonal() * phir;
      sum_r2 += Gr * Gr;
      sum_p2 += Gp * Gp;
      add_kron(Gr, Gp, -2.0 * weights.commutativity);
    }
    add_kron(sum_r2, Ip, weights.commutativity);
    add_kron(Ir, sum_p2, weights.commutativity);
  }
  if (weights.laplacian > 0) {
    for (int b = 0; b < kr; ++b) {
      for (int a = 0; a < kp; ++a) {
        const double diff = source_basis.lambda[a] - target_basis.lambda[b];
        M(a + kp * b, a + kp * b) += weights.laplacian * diff * diff;
      }
    }
  }

  Eigen::LDLT<MatrixXd> ldlt(M);
  const VectorXd D = ldlt.vectorD().cwiseAbs();
  const bool singular = ldlt.info() != Eigen::Success || !(D.minCoeff() > 1e-12 * D.maxCoeff());
  if (singular) {
    warn("singular_normal_equations",
         "functional map normal equations are singular; adding a ridge term");
  }
  if (singular || weights.ridge > 0) {
    M.diagonal().array() += weights.ridge;
    ldlt.compute(M);
  }
  const VectorXd x = ldlt.solve(rhs);
  return Eigen::Map<const MatrixXd>(x.data(), kp, kr);
}

MatrixXd fmap_from_pointmap(const PointMap& map, const SpectralBasis& source_basis,
                            const SpectralBasis& target_basis) {
  const int n = source_basis.num_vertices();
  if (static_cast<int>(map.size()) != n) {
    throw InvalidArgument("point map length differs from the source vertex count");
  }
  MatrixXd pulled(n, target_basis.size());
  for (int i = 0; i < n; ++i) {
    const int t = map[i];
    if (t < 0 || t >= target_basis.num_vertices()) {
      throw InvalidArgument("point map entry " + std::to_string(i) + " is out of range");
    }
    pulled.row(i) = target_basis.phi.row(t);
  }
  return source_basis.phi.transpose() * source_basis.mass.asDiagonal() * pulled;
}

MatrixXd VectorFieldOperator::reduced(const SpectralBasis& basis) const {
  return basis.phi.transpose() * basis.mass.asDiagonal() * (matrix * basis.phi);
}

MatrixXc FunctionOperator::reduced(const SpectralBasis& functions,
                                   const ComplexSpectralBasis& fields) const {
  const VectorXc w = functions.mass.cast<Complex>().cwiseProduct(diag);
  return functions.phi.transpose().cast<Complex>() * w.asDiagonal() * fields.psi;
}

VectorFieldOperator dx_operator(const VectorXc& field, const VertexGradientOperator& gradient) {
  if (field.size() != gradient.matrix.rows()) {
    throw InvalidArgument("field length differs from the gradient operator");
  }
  SparseMatrixc scaled = field.conjugate().asDiagonal() * gradient.matrix;
  VectorFieldOperator D{scaled.real()};
  D.matrix.prune(0.0);
  return D;
}

FunctionOperator df_operator(const VectorXd& f, const VertexGradientOperator& gradient) {
  if (f.size() != gradient.matrix.cols()) {
    throw InvalidArgument("function length differs from the gradient operator");
  }
  return {gradient.apply(f).conjugate()};
}

}  // namespace cfmaps
