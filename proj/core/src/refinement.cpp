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

#include "cfmaps/refinement.hpp"

#include "cfmaps/conversion.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/nearest_neighbor.hpp"

#include <Eigen/Dense>

#include <random>

namespace cfmaps {

namespace {

MatrixXd gather_rows(const MatrixXd& m, const PointMap& map) {
  MatrixXd out(static_cast<Eigen::Index>(map.size()), m.cols());
  for (std::size_t i = 0; i < map.size(); ++i) out.row(i) = m.row(map[i]);
  return out;
}

void check_map(const PointMap& map, int n_source, int n_target, const char* name) {
  if (static_cast<int>(map.size()) != n_source) {
    throw InvalidArgument(std::string(name) + " has the wrong length");
  }
  for (int v : map) {
    if (v < 0 || v >= n_target) throw InvalidArgument(std::string(name) + " has an invalid entry");
  }
}

/// Per-k views of the bases.
struct Level {
  int k;
  SpectralBasis bm, bn;
  QOptions qopt;

  Level(const ShapeData& M, const ShapeData& N, int k_)
      : k(k_), bm(M.basis.truncated(k_)), bn(N.basis.truncated(k_)) {
    qopt.k_complex_source = k;
    qopt.k_complex_target = k;
  }
};

void emit(const RefinementOptions& o, RefinementResult& res, int k, int inner, double residual,
          const MatrixXd& C, const MatrixXc* Q, const PointMap& start) {
  res.log.push_back({k, inner, residual});
  if (o.observer) o.observer({k, inner, residual, &C, Q, &start});
}

void check_common(const PointMap& map_mn, const ShapeData& M, const ShapeData& N,
                  const RefinementSchedule& schedule, bool complex) {
  check_map(map_mn, M.num_vertices(), N.num_vertices(), "map_mn");
  int max_k = std::min(M.k_real(), N.k_real());
  if (complex) max_k = std::min({max_k, M.k_complex(), N.k_complex()});
  schedule.validate(max_k);
}

}  // namespace

RefinementSchedule RefinementSchedule::range(int k_start, int k_end, int step, int inner_loops) {
  if (step < 1 || k_start < 1 || k_end < k_start) {
    throw InvalidArgument("invalid refinement schedule range");
  }
  RefinementSchedule s;
  for (int k = k_start; k <= k_end; k += step) s.k_list.push_back(k);
  if (s.k_list.back() != k_end) s.k_list.push_back(k_end);
  s.inner_loops = inner_loops;
  return s;
}

void RefinementSchedule::validate(int max_k) const {
  if (k_list.empty()) throw InvalidArgument("refinement schedule is empty");
  if (inner_loops < 1) throw InvalidArgument("inner loop count must be positive");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 1) throw InvalidArgument("basis sizes must be positive");
    if (i > 0 && k_list[i] <= k_list[i - 1]) {
      throw InvalidArgument("basis sizes must be strictly increasing");
    }
  }
  if (k_list.back() > max_k) {
    throw InvalidArgument("schedule needs " + std::to_string(k_list.back()) +
                          " basis functions but only " + std::to_string(max_k) + " are available");
  }
}

std::string to_string(RefinementAlgorithm algo) {
  switch (algo) {
    case RefinementAlgorithm::zoomout: return "zo";
    case RefinementAlgorithm::complex_zoomout: return "czo";
    case RefinementAlgorithm::bijective: return "cbzo";
    case RefinementAlgorithm::discrete_conformal: return "cdo-conf";
    case RefinementAlgorithm::discrete_isometric: return "cdo-iso";
  }
  return "zo";
}

std::optional<RefinementAlgorithm> parse_refinement_algorithm(std::string_view name) {
  for (auto a : {RefinementAlgorithm::zoomout, RefinementAlgorithm::complex_zoomout,
                 RefinementAlgorithm::bijective, RefinementAlgorithm::discrete_conformal,
                 RefinementAlgorithm::discrete_isometric}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

RefinementResult zoomout(const PointMap& map_mn, const ShapeData& M, const ShapeData& N,
                         const RefinementSchedule& schedule, const RefinementOptions& options) {
  check_common(map_mn, M, N, schedule, false);
  RefinementResult res{map_mn, {}, {}};
  for (int k : schedule.k_list) {
    const Level lv(M, N, k);
    for (int it = 0; it < schedule.inner_loops; ++it) {
      const PointMap start = res.map_mn;
      const MatrixXd C = fmap_from_pointmap(res.map_mn, lv.bm, lv.bn);
      res.map_mn = pointmap_from_fmap(C, lv.bm, lv.bn);
      emit(options, res, k, it, embedding_residual(C, res.map_mn, lv.bm, lv.bn), C, nullptr, start);
    }
  }
  return res;
}

RefinementResult complex_zoomout(const PointMap& map_mn, const ShapeData& M, const ShapeData& N,
                                 const RefinementSchedule& schedule,
                                 const RefinementOptions& options) {
  if (!options.use_q_step) return zoomout(map_mn, M, N, schedule, options);
  check_common(map_mn, M, N, schedule, true);
  RefinementResult res{map_mn, {}, {}};
  for (int k : schedule.k_list) {
    const Level lv(M, N, k);
    for (int it = 0; it < schedule.inner_loops; ++it) {
      const PointMap start = res.map_mn;
      const MatrixXd C = fmap_from_pointmap(res.map_mn, lv.bm, lv.bn);
      const MatrixXc Q = estimate_q_procrustes(C, M, N, lv.qopt);
      res.map_mn = pointmap_from_q(Q, M, N);
      emit(options, res, k, it, embedding_residual(C, res.map_mn, lv.bm, lv.bn), C, &Q, start);
    }
  }
  return res;
}

MatrixXd bijective_fmap(const PointMap& map_mn, const PointMap& map_nm, const MatrixXd& phi_m,
                        const MatrixXd& phi_n) {
  const MatrixXd pulled_n = gather_rows(phi_n, map_mn);  // Pi_MN Phi_N, |V_M| x k
  const MatrixXd pulled_m = gather_rows(phi_m, map_nm);  // Pi_NM Phi_M, |V_N| x k
  const MatrixXd lhs = phi_n.transpose() * phi_n + pulled_n.transpose() * pulled_n;
  const MatrixXd rhs = phi_n.transpose() * pulled_m + pulled_n.transpose() * phi_m;
  return lhs.ldlt().solve(rhs);
}

RefinementResult complex_bijective_zoomout(const PointMap& map_mn, const PointMap& map_nm,
                                           const ShapeData& M, const ShapeData& N,
                                           const RefinementSchedule& schedule,
                                           const RefinementOptions& options) {
  check_common(map_mn, M, N, schedule, options.use_q_step);
  check_map(map_nm, N.num_vertices(), M.num_vertices(), "map_nm");
  RefinementResult res{map_mn, map_nm, {}};
  for (int k : schedule.k_list) {
    const Level lv(M, N, k);
    const MatrixXd& pm = lv.bm.phi;
    const MatrixXd& pn = lv.bn.phi;
    for (int it = 0; it < schedule.inner_loops; ++it) {
      const PointMap start = res.map_mn;
      MatrixXc Q_nm;
      if (options.use_q_step) {
        const MatrixXd C_nm = fmap_from_pointmap(res.map_mn, lv.bm, lv.bn);
        const MatrixXd C_mn = fmap_from_pointmap(res.map_nm, lv.bn, lv.bm);
        QOptions qo = lv.qopt;
        const MatrixXc Q_mn = estimate_q_procrustes(C_mn, N, M, qo);
        Q_nm = estimate_q_procrustes(C_nm, M, N, qo);
        res.map_mn = pointmap_from_q(Q_nm, M, N);
        res.map_nm = pointmap_from_q(Q_mn, N, M);
      }
      const MatrixXd C_mn = bijective_fmap(res.map_mn, res.map_nm, pm, pn);
      const MatrixXd C_nm = bijective_fmap(res.map_nm, res.map_mn, pn, pm);
      MatrixXd target_n(pn.rows(), 2 * k), query_m(pm.rows(), 2 * k);
      target_n << pn * C_nm.transpose(), pn * C_mn;
      query_m << pm, pm;
      MatrixXd target_m(pm.rows(), 2 * k), query_n(pn.rows(), 2 * k);
      target_m << pm * C_mn.transpose(), pm * C_nm;
      query_n << pn, pn;
      res.map_mn = nearest_neighbors(target_n, query_m);
      res.map_nm = nearest_neighbors(target_m, query_n);
      const MatrixXd C_report = fmap_from_pointmap(res.map_mn, lv.bm, lv.bn);
      emit(options, res, k, it, embedding_residual(C_report, res.map_mn, lv.bm, lv.bn), C_nm,
           options.use_q_step ? &Q_nm : nullptr, start);
    }
  }
  return res;
}

RefinementResult complex_discrete_optimization(const PointMap& map_mn, const ShapeData& M,
                                               const ShapeData& N,
                                               const RefinementSchedule& schedule,
                                               DiscreteEnergy energy,
                                               const RefinementOptions& options) {
  check_common(map_mn, M, N, schedule, options.use_q_step);
  RefinementResult res{map_mn, {}, {}};
  auto refit = [&](MatrixXd C, const Level& lv) {
    if (energy == DiscreteEnergy::isometric) return orthogonal_projection(C);
    for (int r = 0; r < lv.k; ++r) {
      for (int c = 0; c < lv.k; ++c) {
        const double d = lv.bm.lambda[r] - lv.bn.lambda[c];
        C(r, c) /= 1.0 + options.conformal_weight * d * d;
      }
    }
    return C;
  };
  for (int k : schedule.k_list) {
    const Level lv(M, N, k);
    for (int it = 0; it < schedule.inner_loops; ++it) {
      const PointMap start = res.map_mn;
      MatrixXd C = fmap_from_pointmap(res.map_mn, lv.bm, lv.bn);
      if (options.use_q_step) {
        const MatrixXc Q = estimate_q_procrustes(C, M, N, lv.qopt);
        const PointMap step_map = pointmap_from_q(Q, M, N);
        C = refit(fmap_from_pointmap(step_map, lv.bm, lv.bn), lv);
        const MatrixXc Q2 = estimate_q_procrustes(C, M, N, lv.qopt);
        res.map_mn = pointmap_from_q(Q2, M, N);
        emit(options, res, k, it, embedding_residual(C, res.map_mn, lv.bm, lv.bn), C, &Q2, start);
      } else {
        C = refit(C, lv);
        res.map_mn = pointmap_from_fmap(C, lv.bm, lv.bn);
        emit(options, res, k, it, embedding_residual(C, res.map_mn, lv.bm, lv.bn), C, nullptr,
             start);
      }
    }
  }
  return res;
}

RefinementResult refine(RefinementAlgorithm algo, const PointMap& map_mn, const PointMap* map_nm,
                        const ShapeData& M, const ShapeData& N,
                        const RefinementSchedule& schedule, const RefinementOptions& options) {
  switch (algo) {
    case RefinementAlgorithm::zoomout:
      return zoomout(map_mn, M, N, schedule, options);
    case RefinementAlgorithm::complex_zoomout:
      return complex_zoomout(map_mn, M, N, schedule, options);
    case RefinementAlgorithm::bijective: {
      PointMap reverse;
      if (map_nm) {
        reverse = *map_nm;
      } else {
        check_map(map_mn, M.num_vertices(), N.num_vertices(), "map_mn");
        const int k = schedule.k_list.empty() ? 1 : schedule.k_list.front();
        const SpectralBasis bm = M.basis.truncated(k), bn = N.basis.truncated(k);
        reverse = pointmap_from_fmap(fmap_from_pointmap(map_mn, bm, bn).transpose(), bn, bm);
      }
      return complex_bijective_zoomout(map_mn, reverse, M, N, schedule, options);
    }
    case RefinementAlgorithm::discrete_conformal:
      return complex_discrete_optimization(map_mn, M, N, schedule, DiscreteEnergy::conformal,
                                           options);
    case RefinementAlgorithm::discrete_isometric:
      return complex_discrete_optimization(map_mn, M, N, schedule, DiscreteEnergy::isometric,
                                           options);
  }
  throw InvalidArgument("unknown refinement algorithm");
}

MatrixXd random_orthonormal(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd g(k, k);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const VectorXd d = qr.matrixQR().diagonal();
  for (int i = 0; i < k; ++i) {
    if (d[i] < 0) q.col(i) *= -1.0;
  }
  return q;
}

PointMap random_initial_map(const ShapeData& M, const ShapeData& N, int k, std::uint64_t seed) {
  return pointmap_from_fmap(random_orthonormal(k, seed), M.basis.truncated(k),
                            N.basis.truncated(k));
}

}  // namespace cfmaps
