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

#include "cfmaps/shape_data.hpp"

namespace cfmaps {

namespace {

void finish(ShapeData& s) {
  const int kphi = s.k_real();
  s.grad_phi = s.gradient.matrix * s.basis.phi.cast<Complex>();
  s.div_psi = s.divergence.matrix * s.complex_basis.psi;
  s.reduced_df.resize(kphi);
  const MatrixXc phit = s.basis.phi.transpose().cast<Complex>();
  for (int l = 0; l < kphi; ++l) {
    const VectorXc w = s.mass.diag.cast<Complex>().cwiseProduct(s.grad_phi.col(l).conjugate());
    s.reduced_df[l] = phit * (w.asDiagonal() * s.complex_basis.psi);
  }
}

ShapeData operators(const TriMesh& mesh, const TangentFrames& frames) {
  ShapeData s;
  s.mesh = mesh;
  s.mass = mass_matrix(mesh);
  s.laplacian = cotan_laplacian(mesh);
  s.frames = frames;
  s.gradient = vertex_gradient(mesh, frames);
  s.divergence = vertex_divergence(s.gradient, s.mass);
  s.connection = connection_laplacian(mesh, frames);
  return s;
}

}  // namespace

ShapeData make_shape_data(const TriMesh& mesh, int k_real, int k_complex,
                          const EigenOptions& options) {
  return make_shape_data(mesh, build_frames(mesh), k_real, k_complex, options);
}

ShapeData make_shape_data(const TriMesh& mesh, const TangentFrames& frames, int k_real,
                          int k_complex, const EigenOptions& options) {
  ShapeData s = operators(mesh, frames);
  s.basis = eig_real(s.laplacian, s.mass, k_real, options);
  s.complex_basis = eig_complex(s.connection, s.mass, k_complex, options);
  finish(s);
  return s;
}

ShapeData make_shape_data(const TriMesh& mesh, const BasisBundle& bases) {
  if (bases.real.num_vertices() != mesh.num_vertices() ||
      bases.complex.num_vertices() != mesh.num_vertices()) {
    throw InvalidArgument("bases do not match the mesh");
  }
  ShapeData s = operators(mesh, build_frames(mesh));
  s.basis = bases.real;
  s.complex_basis = bases.complex;
  finish(s);
  return s;
}

MatrixXc reduced_df_combination(const ShapeData& shape, const Eigen::Ref<const VectorXd>& c,
                                int k_phi, int k_psi) {
  if (c.size() > shape.k_real() || k_phi > shape.k_real() || k_psi > shape.k_complex()) {
    throw InvalidArgument("reduced operator request exceeds the precomputed bases");
  }
  MatrixXc out = MatrixXc::Zero(k_phi, k_psi);
  for (Eigen::Index l = 0; l < c.size(); ++l) {
    if (c[l] != 0.0) out += c[l] * shape.reduced_df[l].topLeftCorner(k_phi, k_psi);
  }
  return out;
}

}  // namespace cfmaps
