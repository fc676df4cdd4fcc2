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

#include "cfmaps/conversion.hpp"

#include "cfmaps/errors.hpp"
#include "cfmaps/mesh_io.hpp"
#include "cfmaps/nearest_neighbor.hpp"

#include <Eigen/Dense>

#include <fstream>

namespace cfmaps {

PointMap pointmap_from_fmap(const MatrixXd& C, const SpectralBasis& P, const SpectralBasis& R) {
  const int kp = static_cast<int>(C.rows());
  const int kr = static_cast<int>(C.cols());
  if (kp > P.size() || kr > R.size()) throw InvalidArgument("functional map larger than bases");
  return nearest_neighbors(R.phi.leftCols(kr), P.phi.leftCols(kp) * C);
}

MatrixXd flatten_complex(const MatrixXc& m) {
  MatrixXd out(m.rows(), 2 * m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out.col(2 * j) = m.col(j).real();
    out.col(2 * j + 1) = m.col(j).imag();
  }
  return out;
}

PointMap pointmap_from_q(const MatrixXc& Q, const ShapeData& P, const ShapeData& R) {
  const int kp = static_cast<int>(Q.rows());
  const int kr = static_cast<int>(Q.cols());
  if (kp > P.k_complex() || kr > R.k_complex()) throw InvalidArgument("Q larger than bases");
  const MatrixXd targets = flatten_complex(R.div_psi.leftCols(kr));
  const MatrixXd queries = flatten_complex(P.div_psi.leftCols(kp) * Q);
  return nearest_neighbors(targets, queries);
}

MatrixXd orthogonal_projection(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double embedding_residual(const MatrixXd& C, const PointMap& map, const SpectralBasis& P,
                          const SpectralBasis& R) {
  const int kp = static_cast<int>(C.rows());
  const int kr = static_cast<int>(C.cols());
  const MatrixXd E = P.phi.leftCols(kp) * C;
  double total = 0.0;
  for (int i = 0; i < E.rows(); ++i) {
    total += P.mass[i] * (E.row(i) - R.phi.row(map[i]).head(kr)).squaredNorm();
  }
  return total;
}

IcpResult icp_refine(const MatrixXd& C, const SpectralBasis& P, const SpectralBasis& R,
                     int iterations) {
  if (C.rows() != C.cols()) throw InvalidArgument("ICP refinement needs a square functional map");
  const int k = static_cast<int>(C.rows());
  const SpectralBasis Pk = P.truncated(k);
  const SpectralBasis Rk = R.truncated(k);
  IcpResult out{C, {}, {}};
  out.map = pointmap_from_fmap(out.C, Pk, Rk);
  // Residuals start after the first re-fit, once C is orthogonal; from there
  // both steps minimize the same energy.
  for (int it = 0; it < iterations; ++it) {
    out.C = orthogonal_projection(fmap_from_pointmap(out.map, Pk, Rk));
    out.map = pointmap_from_fmap(out.C, Pk, Rk);
    out.residuals.push_back(embedding_residual(out.C, out.map, Pk, Rk));
  }
  return out;
}

void save_pointmap(const std::filesystem::path& path, const PointMap& map) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (int v : map) out << v << '\n';
}

PointMap load_pointmap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  PointMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    char* end = nullptr;
    const long v = std::strtol(line.c_str() + first, &end, 10);
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (end == line.c_str() + first || *end != '\0' || v < 0) {
      throw FormatError("expected a non-negative vertex index", lineno);
    }
    map.push_back(static_cast<int>(v));
  }
  return map;
}

void save_pointmap_colors(const std::filesystem::path& path, const TriMesh& source,
                          const TriMesh& target, const PointMap& map) {
  if (static_cast<int>(map.size()) != source.num_vertices()) {
    throw InvalidArgument("point map length differs from the source vertex count");
  }
  const auto& T = target.vertices();
  if (path.extension() == ".vtk") {
    std::vector<VtkScalarField> fields;
    for (int d = 0; d < 3; ++d) {
      VtkScalarField f{std::string("image_") + "xyz"[d], VectorXd(source.num_vertices())};
      for (int v = 0; v < source.num_vertices(); ++v) f.values[v] = T(map[v], d);
      fields.push_back(std::move(f));
    }
    save_vtk(source, path, fields);
    return;
  }
  const Eigen::RowVector3d lo = T.colwise().minCoeff();
  const Eigen::RowVector3d span = (T.colwise().maxCoeff() - lo).cwiseMax(1e-300);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor> colors(source.num_vertices(), 3);
  for (int v = 0; v < source.num_vertices(); ++v) {
    const Eigen::RowVector3d c = (T.row(map[v]) - lo).cwiseQuotient(span);
    for (int d = 0; d < 3; ++d) {
      colors(v, d) = static_cast<std::uint8_t>(std::clamp(c[d], 0.0, 1.0) * 255.0 + 0.5);
    }
  }
  save_ply(source, path, &colors);
}

}  // namespace cfmaps
