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

#include "cfmaps/qmaps.hpp"

#include "cfmaps/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cfmaps {

namespace {

struct Sizes {
  int kp, kr, probes, kpsi_p, kpsi_r;
};

Sizes sizes_for(const MatrixXd& C, const ShapeData& P, const ShapeData& R, const QOptions& o) {
  Sizes s{static_cast<int>(C.rows()), static_cast<int>(C.cols()), o.probe_count,
          o.k_complex_source, o.k_complex_target};
  if (s.probes <= 0) s.probes = s.kr;
  if (s.kpsi_p <= 0) s.kpsi_p = s.kp;
  if (s.kpsi_r <= 0) s.kpsi_r = s.kr;
  if (s.kp > P.k_real() || s.kr > R.k_real()) {
    throw InvalidArgument("functional map is larger than the precomputed bases");
  }
  if (s.probes > s.kr) throw InvalidArgument("probe count exceeds the functional map size");
  if (s.kpsi_p > P.k_complex() || s.kpsi_r > R.k_complex()) {
    throw InvalidArgument("complex basis request exceeds the precomputed bases");
  }
  return s;
}

}  // namespace

QSystem assemble_q_system(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                          const QOptions& options) {
  const Sizes s = sizes_for(C, P, R, options);
  QSystem sys{MatrixXc(s.kp * s.probes, s.kpsi_r), MatrixXc(s.kp * s.probes, s.kpsi_p)};
  const MatrixXc Cc = C.cast<Complex>();
  for (int i = 0; i < s.probes; ++i) {
    sys.A.middleRows(i * s.kp, s.kp) =
        Cc * R.reduced_df[i].topLeftCorner(s.kr, s.kpsi_r);
    sys.B.middleRows(i * s.kp, s.kp) = reduced_df_combination(P, C.col(i), s.kp, s.kpsi_p);
  }
  return sys;
}

MatrixXc estimate_q_lsq(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                        const QOptions& options) {
  const QSystem sys = assemble_q_system(C, P, R, options);
  Eigen::BDCSVD<MatrixXc> svd(sys.B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff = options.pinv_cutoff * (sv.size() ? sv[0] : 0.0);
  VectorXd inv = VectorXd::Zero(sv.size());
  int dropped = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv[j] > cutoff) {
      inv[j] = 1.0 / sv[j];
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) {
    warn("rank_deficient_q_system",
         std::to_string(dropped) + " singular value(s) below the pseudo-inverse cutoff");
  }
  return svd.matrixV() * inv.cast<Complex>().asDiagonal() *
         (svd.matrixU().adjoint() * sys.A);
}

ProcrustesResult estimate_q_procrustes_full(const MatrixXd& C, const ShapeData& P,
                                            const ShapeData& R, const QOptions& options) {
  const QSystem sys = assemble_q_system(C, P, R, options);
  if (sys.A.cols() != sys.B.cols()) {
    throw InvalidArgument("Procrustes estimation needs equal complex basis sizes");
  }
  const MatrixXc omega = sys.B.adjoint() * sys.A;
  Eigen::JacobiSVD<MatrixXc> svd(omega, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult out;
  out.Q = svd.matrixU() * svd.matrixV().adjoint();
  out.singular_values = svd.singularValues();
  const auto& sv = out.singular_values;
  out.ill_conditioned = sv.size() == 0 || !(sv[sv.size() - 1] > 1e-10 * sv[0]);
  return out;
}

MatrixXc estimate_q_procrustes(const MatrixXd& C, const ShapeData& P, const ShapeData& R,
                               const QOptions& options) {
  return estimate_q_procrustes_full(C, P, R, options).Q;
}

double q_energy(const MatrixXd& C, const MatrixXc& Q, const ShapeData& P, const ShapeData& R,
                const QOptions& options) {
  QOptions o = options;
  if (o.k_complex_source <= 0) o.k_complex_source = static_cast<int>(Q.rows());
  if (o.k_complex_target <= 0) o.k_complex_target = static_cast<int>(Q.cols());
  const QSystem sys = assemble_q_system(C, P, R, o);
  return (sys.A - sys.B * Q).squaredNorm();
}

double cq_energy(const MatrixXd& C, const MatrixXc& Q, const ShapeData& P, const ShapeData& R) {
  const int kp = static_cast<int>(C.rows());
  const int kr = static_cast<int>(C.cols());
  const int kpsi_p = static_cast<int>(Q.rows());
  const int kpsi_r = static_cast<int>(Q.cols());
  const SpectralBasis bp = P.basis.truncated(kp);
  const SpectralBasis br = R.basis.truncated(kr);
  const MatrixXc psi_p = P.complex_basis.psi.leftCols(kpsi_p);
  double total = 0.0;
  for (int j = 0; j < kpsi_r; ++j) {
    for (const Complex z : {Complex(1, 0), Complex(0, 1)}) {
      const VectorXc X = z * R.complex_basis.psi.col(j);
      const VectorXc QX = psi_p * (z * Q.col(j));
      const MatrixXd DR = dx_operator(X, R.gradient).reduced(br);
      const MatrixXd DP = dx_operator(QX, P.gradient).reduced(bp);
      total += (C * DR - DP * C).squaredNorm();
    }
  }
  return total;
}

ClosedFormQ q_closed_form(const PointMap& map, const ShapeData& P, const ShapeData& R,
                          ClosedFormProbes probes, int probe_count) {
  const int np = P.num_vertices();
  if (static_cast<int>(map.size()) != np) {
    throw InvalidArgument("point map length differs from the source vertex count");
  }
  for (int v : map) {
    if (v < 0 || v >= R.num_vertices()) throw InvalidArgument("point map entry out of range");
  }
  ClosedFormQ out{VectorXc::Zero(np), VectorXd::Zero(np), MatrixXc()};
  std::vector<bool> solved(np, false);
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> GP_rows = P.gradient.matrix;
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> GR_rows = R.gradient.matrix;

  auto gr_entry = [&](int row, int col) {
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(GR_rows, row); it; ++it) {
      if (it.col() == col) return it.value();
    }
    return Complex(0, 0);
  };

  MatrixXc pulled_grad;
  if (probes == ClosedFormProbes::spectral) {
    const int m = probe_count > 0 ? std::min(probe_count, R.k_real()) : R.k_real();
    MatrixXd pulled(np, m);
    for (int p = 0; p < np; ++p) pulled.row(p) = R.basis.phi.row(map[p]).head(m);
    pulled_grad = P.gradient.matrix * pulled.cast<Complex>();
  }

  int fallback = 0;
  for (int p = 0; p < np; ++p) {
    // b: gradients on P of the probes, a: gradients on R at the image.
    Complex num(0, 0);
    double den = 0.0, norm_a = 0.0;
    std::vector<std::pair<Complex, Complex>> terms;
    if (probes == ClosedFormProbes::hat) {
      // Hat functions of P's stencil at p, matched to hats on R through the
      // map. Repeated images are summed.
      std::vector<std::pair<int, Complex>> stencil;
      for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(GP_rows, p); it; ++it) {
        stencil.emplace_back(static_cast<int>(it.col()), it.value());
      }
      for (const auto& [v, b] : stencil) terms.emplace_back(b, gr_entry(map[p], map[v]));
    } else {
      const int m = static_cast<int>(pulled_grad.cols());
      for (int l = 0; l < m; ++l) {
        terms.emplace_back(pulled_grad(p, l), R.grad_phi(map[p], l));
      }
    }
    for (const auto& [b, a] : terms) {
      num += b * std::conj(a);
      den += std::norm(b);
      norm_a += std::norm(a);
    }
    if (den > 1e-24 * std::max(norm_a, 1e-300) && den > 0.0) {
      const Complex q = num / den;
      out.q[p] = q;
      double res = 0.0;
      for (const auto& [b, a] : terms) res += std::norm(std::conj(q) * b - a);
      out.residual[p] = norm_a > 0 ? res / norm_a : 0.0;
      solved[p] = true;
    } else {
      ++fallback;
    }
  }
  if (fallback > 0) {
    warn("zero_probe_gradient", std::to_string(fallback) +
                                    " vertex(es) without probe gradients; using neighbour average");
    for (int p = 0; p < np; ++p) {
      if (solved[p]) continue;
      Complex sum(0, 0);
      int count = 0;
      for (int v : P.mesh.neighbors(p)) {
        if (solved[v]) {
          sum += out.q[v];
          ++count;
        }
      }
      out.q[p] = count ? sum / static_cast<double>(count) : Complex(0, 0);
    }
  }

  MatrixXc pushed(np, R.k_complex());
  for (int p = 0; p < np; ++p) pushed.row(p) = out.q[p] * R.complex_basis.psi.row(map[p]);
  out.Q = P.complex_basis.psi.adjoint() * (P.mass.diag.cast<Complex>().asDiagonal() * pushed);
  return out;
}

double check_isometry_commutator(const MatrixXc& Q, const ComplexSpectralBasis& P,
                                 const ComplexSpectralBasis& R) {
  const int kp = static_cast<int>(Q.rows());
  const int kr = static_cast<int>(Q.cols());
  if (kp > P.size() || kr > R.size()) throw InvalidArgument("Q larger than the bases");
  const VectorXc lp = P.lambda.head(kp).cast<Complex>();
  const VectorXc lr = R.lambda.head(kr).cast<Complex>();
  const MatrixXc comm = lp.asDiagonal() * Q - Q * lr.asDiagonal();
  const double scale = std::max(P.lambda.head(kp).cwiseAbs().maxCoeff(),
                                R.lambda.head(kr).cwiseAbs().maxCoeff());
  const double qn = Q.norm();
  if (!(qn > 0.0) || !(scale > 0.0)) return 0.0;
  return comm.norm() / (qn * scale);
}

}  // namespace cfmaps
