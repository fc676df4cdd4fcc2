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

#include "cfmaps/transfer.hpp"

#include "cfmaps/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace cfmaps {

namespace {

double a_norm(const VectorXc& x, const VectorXd& mass) {
  return std::sqrt((x.array().abs2() * mass.array()).sum());
}

}  // namespace

VectorXc transfer_complex(const MatrixXc& Q, const VectorXc& X, const ShapeData& P,
                          const ShapeData& R) {
  const int kp = static_cast<int>(Q.rows());
  const int kr = static_cast<int>(Q.cols());
  if (kp > P.k_complex() || kr > R.k_complex()) throw InvalidArgument("Q larger than bases");
  if (X.size() != R.num_vertices()) throw InvalidArgument("field length mismatch");
  const VectorXc x = R.complex_basis.psi.leftCols(kr).adjoint() *
                     (R.mass.diag.cast<Complex>().asDiagonal() * X);
  return P.complex_basis.psi.leftCols(kp) * (Q * x);
}

HodgeDecomposition hodge_decompose(const VectorXc& X, const ShapeData& shape, double ridge) {
  const int n = shape.num_vertices();
  if (X.size() != n) throw InvalidArgument("field length mismatch");
  const SparseMatrixd Gr = shape.gradient.matrix.real();
  const SparseMatrixd Gi = shape.gradient.matrix.imag();
  // S [f; g] = [Re; Im] of (G f + i G g).
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * Gr.nonZeros());
  for (int c = 0; c < n; ++c) {
    for (SparseMatrixd::InnerIterator it(Gr, c); it; ++it) {
      t.emplace_back(it.row(), c, it.value());
      t.emplace_back(n + it.row(), n + c, it.value());
    }
    for (SparseMatrixd::InnerIterator it(Gi, c); it; ++it) {
      t.emplace_back(it.row(), n + c, -it.value());
      t.emplace_back(n + it.row(), c, it.value());
    }
  }
  SparseMatrixd S(2 * n, 2 * n);
  S.setFromTriplets(t.begin(), t.end());
  VectorXd w(2 * n);
  w << shape.mass.diag, shape.mass.diag;
  VectorXd b(2 * n);
  b << X.real(), X.imag();

  SparseMatrixd M = S.transpose() * w.asDiagonal() * S;
  const double scale = M.diagonal().sum() / (2.0 * n);
  for (int i = 0; i < 2 * n; ++i) M.coeffRef(i, i) += ridge * scale;
  Eigen::SimplicialLDLT<SparseMatrixd> solver(M);
  if (solver.info() != Eigen::Success) throw SolverError("Hodge decomposition solve failed");
  const VectorXd fg = solver.solve(S.transpose() * w.cwiseProduct(b));
  HodgeDecomposition out;
  out.f = fg.head(n);
  out.g = fg.tail(n);
  const VectorXc fit = shape.gradient.apply(out.f) + Complex(0, 1) * shape.gradient.apply(out.g);
  const double xn = a_norm(X, shape.mass.diag);
  out.residual = xn > 0 ? a_norm(X - fit, shape.mass.diag) / xn : 0.0;
  return out;
}

VectorXc transfer_hodge(const MatrixXd& C, const VectorXc& X, const ShapeData& P,
                        const ShapeData& R, const HodgeOptions& options) {
  const int kp = static_cast<int>(C.rows());
  const int kr = static_cast<int>(C.cols());
  if (kp > P.k_real() || kr > R.k_real()) throw InvalidArgument("C larger than bases");
  const HodgeDecomposition h = hodge_decompose(X, R, options.ridge);
  if (h.residual > options.harmonic_tolerance) {
    warn("harmonic_residual", "field has a non-gradient, non-rotated-gradient part of relative "
                              "norm " + std::to_string(h.residual));
  }
  const SpectralBasis br = R.basis.truncated(kr);
  const VectorXd cf = C * br.project(h.f);
  const VectorXd cg = C * br.project(h.g);
  const MatrixXc gp = P.grad_phi.leftCols(kp);
  return gp * cf.cast<Complex>() + Complex(0, 1) * (gp * cg.cast<Complex>());
}

VectorXc transfer_operator_lsq(const MatrixXd& C, const VectorXc& X, const ShapeData& P,
                               const ShapeData& R, double ridge) {
  const int kp = static_cast<int>(C.rows());
  const int kr = static_cast<int>(C.cols());
  const int kpsi = std::min(kp, P.k_complex());
  if (kp > P.k_real() || kr > R.k_real()) throw InvalidArgument("C larger than bases");
  if (X.size() != R.num_vertices()) throw InvalidArgument("field length mismatch");
  const SpectralBasis br = R.basis.truncated(kr);
  const MatrixXd target = C * dx_operator(X, R.gradient).reduced(br);

  // Column j of the design holds vec(D_{Psi_j} C), column kpsi + j vec(D_{i Psi_j} C).
  const int rows = kp * kr;
  MatrixXd design(rows, 2 * kpsi);
  MatrixXd Dre(kp, kp), Dim(kp, kp);
  for (int j = 0; j < kpsi; ++j) {
    for (int b = 0; b < kp; ++b) {
      const auto col = P.reduced_df[b].col(j).head(kp);
      Dre.col(b) = col.real();
      Dim.col(b) = -col.imag();
    }
    const MatrixXd a = Dre * C;
    const MatrixXd c = Dim * C;
    design.col(j) = Eigen::Map<const VectorXd>(a.data(), rows);
    design.col(kpsi + j) = Eigen::Map<const VectorXd>(c.data(), rows);
  }
  MatrixXd N = design.transpose() * design;
  const double scale = N.diagonal().mean();
  N.diagonal().array() += ridge * (scale > 0 ? scale : 1.0);
  const VectorXd rhs = design.transpose() * Eigen::Map<const VectorXd>(target.data(), rows);
  const VectorXd uv = N.ldlt().solve(rhs);
  VectorXc y(kpsi);
  for (int j = 0; j < kpsi; ++j) y[j] = Complex(uv[j], uv[kpsi + j]);
  return P.complex_basis.psi.leftCols(kpsi) * y;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::random: return "random";
    case NoiseKind::symmetric: return "symmetric";
  }
  return "none";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "none") return NoiseKind::none;
  if (name == "random") return NoiseKind::random;
  if (name == "symmetric") return NoiseKind::symmetric;
  return std::nullopt;
}

MatrixXd make_noisy_fmap(const MatrixXd& C_gt, const NoiseModel& model, const MatrixXd* C_sym) {
  switch (model.kind) {
    case NoiseKind::none:
      return C_gt;
    case NoiseKind::random: {
      if (model.level < 0) throw InvalidArgument("random noise level must be non-negative");
      std::mt19937_64 rng(model.seed);
      std::uniform_real_distribution<double> u(-model.level, model.level);
      MatrixXd C = C_gt;
      if (model.level == 0.0) return C;
      for (Eigen::Index j = 0; j < C.cols(); ++j) {
        for (Eigen::Index i = 0; i < C.rows(); ++i) C(i, j) += u(rng);
      }
      return C;
    }
    case NoiseKind::symmetric: {
      if (!(model.level >= 0.0 && model.level <= 1.0)) {
        throw InvalidArgument("symmetric mixing weight must lie in [0, 1]");
      }
      if (!C_sym) throw InvalidArgument("symmetric noise needs the symmetric functional map");
      if (C_sym->rows() != C_gt.rows() || C_sym->cols() != C_gt.cols()) {
        throw InvalidArgument("symmetric functional map has the wrong shape");
      }
      if (model.level == 1.0) return C_gt;
      if (model.level == 0.0) return *C_sym;
      return model.level * C_gt + (1.0 - model.level) * *C_sym;
    }
  }
  return C_gt;
}

VectorXc random_smooth_field(const ComplexSpectralBasis& basis, std::uint64_t seed, int count) {
  const int k = count > 0 ? std::min(count, basis.size()) : basis.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  VectorXc c = VectorXc::Zero(basis.size());
  for (int j = 0; j < k; ++j) c[j] = std::polar(1.0 / (1.0 + std::abs(basis.lambda[j])), phase(rng));
  return basis.psi * c;
}

VectorXc coordinate_gradient_field(const ShapeData& shape, int axis) {
  if (axis < 0 || axis > 2) throw InvalidArgument("axis must be 0, 1 or 2");
  return shape.gradient.apply(shape.mesh.vertices().col(axis));
}

VectorXc pushforward_field(const VectorXc& q, const PointMap& map, const VectorXc& X) {
  VectorXc Y(map.size());
  for (std::size_t p = 0; p < map.size(); ++p) Y[p] = q[p] * X[map[p]];
  return Y;
}

VectorXc pushforward_ambient(const Eigen::Matrix3d& M, const PointMap& map, const VectorXc& X,
                             const TangentFrames& P, const TangentFrames& R) {
  const Positions amb = R.to_ambient(X);
  Positions moved(static_cast<Eigen::Index>(map.size()), 3);
  for (std::size_t p = 0; p < map.size(); ++p) {
    moved.row(p) = (M * amb.row(map[p]).transpose()).transpose();
  }
  return P.from_ambient(moved);
}

double transfer_error(const VectorXc& Y, const VectorXc& Y_gt, const VectorXc& X,
                      const VectorXd& mass_P, const VectorXd& mass_R) {
  const double xn = a_norm(X, mass_R);
  if (!(xn > 0.0)) throw InvalidArgument("input field has zero norm");
  return a_norm(Y - Y_gt, mass_P) / xn;
}

void write_transfer_csv(std::ostream& out, const std::vector<TransferRecord>& records) {
  out << "pair,method,noise_kind,level,k,error\n";
  const auto precision = out.precision(10);
  for (const auto& r : records) {
    out << r.pair << ',' << r.method << ',' << r.noise_kind << ',' << r.level << ',' << r.k << ','
        << r.error << '\n';
  }
  out.precision(precision);
}

}  // namespace cfmaps
