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

#include "cfmaps/tangent.hpp"

#include "cfmaps/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>

namespace cfmaps {

namespace {

Vec3 row3(const Positions& p, int i) { return p.row(i).transpose(); }

double frame_angle(const TangentFrames& frames, int i, const Vec3& v) {
  return std::atan2(v.dot(row3(frames.basis_y, i)), v.dot(row3(frames.basis_x, i)));
}

void compute_transport(const TriMesh& mesh, TangentFrames& frames) {
  const int n = mesh.num_vertices();
  frames.offsets.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) frames.offsets[v + 1] = frames.offsets[v] + mesh.degree(v);
  frames.adjacency.resize(frames.offsets[n]);
  frames.transport.assign(frames.offsets[n], Complex(1.0, 0.0));
  for (int i = 0; i < n; ++i) {
    const auto ring = mesh.neighbors(i);
    std::copy(ring.begin(), ring.end(), frames.adjacency.begin() + frames.offsets[i]);
  }
  for (int i = 0; i < n; ++i) {
    const auto ring = mesh.neighbors(i);
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const int j = ring[k];
      if (j < i) continue;
      const Vec3 e = mesh.position(j) - mesh.position(i);
      const double theta_ij = frame_angle(frames, i, e);
      const double theta_ji = frame_angle(frames, j, -e);
      const Complex rij = std::polar(1.0, theta_ij - theta_ji + std::numbers::pi);
      frames.transport[frames.offsets[i] + k] = rij;
      const auto back = mesh.neighbors(j);
      const auto it = std::find(back.begin(), back.end(), i);
      frames.transport[frames.offsets[j] + (it - back.begin())] = std::conj(rij);
    }
  }
}

TangentFrames frames_from_reference(const TriMesh& mesh, const std::vector<Vec3>& normals,
                                    const std::vector<Vec3>& reference) {
  const int n = mesh.num_vertices();
  TangentFrames frames;
  frames.basis_x.resize(n, 3);
  frames.basis_y.resize(n, 3);
  frames.normal.resize(n, 3);
  for (int v = 0; v < n; ++v) {
    const Vec3& nv = normals[v];
    Vec3 bx = reference[v] - reference[v].dot(nv) * nv;
    if (!(bx.norm() > 1e-12 * reference[v].norm())) {
      throw InvalidArgument("reference direction at vertex " + std::to_string(v) +
                            " is parallel to the normal");
    }
    bx.normalize();
    frames.normal.row(v) = nv.transpose();
    frames.basis_x.row(v) = bx.transpose();
    frames.basis_y.row(v) = nv.cross(bx).transpose();
  }
  compute_transport(mesh, frames);
  return frames;
}

void require_faces(const TriMesh& mesh) {
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.degree(v) == 0) {
      throw StructuralError("vertex " + std::to_string(v) + " has no incident face");
    }
  }
}

}  // namespace

Complex TangentFrames::r(int i, int j) const {
  for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
    if (adjacency[k] == j) return transport[k];
  }
  throw InvalidArgument("vertices " + std::to_string(i) + " and " + std::to_string(j) +
                        " are not adjacent");
}

Positions TangentFrames::to_ambient(const VectorXc& field) const {
  Positions out(size(), 3);
  for (int v = 0; v < size(); ++v) {
    out.row(v) = field[v].real() * basis_x.row(v) + field[v].imag() * basis_y.row(v);
  }
  return out;
}

VectorXc TangentFrames::from_ambient(const Positions& vectors) const {
  VectorXc out(size());
  for (int v = 0; v < size(); ++v) {
    out[v] = Complex(vectors.row(v).dot(basis_x.row(v)), vectors.row(v).dot(basis_y.row(v)));
  }
  return out;
}

std::vector<Vec3> angle_weighted_normals(const TriMesh& mesh) {
  std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
  const auto& F = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (is_degenerate_face(mesh, f)) continue;
    const Vec3 a = mesh.position(F(f, 0));
    const Vec3 b = mesh.position(F(f, 1));
    const Vec3 c = mesh.position(F(f, 2));
    const Vec3 fn = (b - a).cross(c - a).normalized();
    const Vec3 p[3] = {a, b, c};
    for (int k = 0; k < 3; ++k) {
      const Vec3 u = p[(k + 1) % 3] - p[k];
      const Vec3 w = p[(k + 2) % 3] - p[k];
      const double angle = std::atan2(u.cross(w).norm(), u.dot(w));
      normals[F(f, k)] += angle * fn;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!(normals[v].norm() > 0.0)) {
      throw StructuralError("vertex " + std::to_string(v) + " has no usable normal");
    }
    normals[v].normalize();
  }
  return normals;
}

TangentFrames build_frames(const TriMesh& mesh) {
  require_faces(mesh);
  const auto normals = angle_weighted_normals(mesh);
  std::vector<Vec3> reference(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& nv = normals[v];
    // First outgoing half-edge; later neighbours only if it is (nearly) normal.
    reference[v] = Vec3::Zero();
    for (int j : mesh.neighbors(v)) {
      const Vec3 e = mesh.position(j) - mesh.position(v);
      if ((e - e.dot(nv) * nv).norm() > 1e-8 * e.norm()) {
        reference[v] = e;
        break;
      }
    }
    if (reference[v].isZero()) {
      throw StructuralError("vertex " + std::to_string(v) + " has no tangential edge");
    }
  }
  return frames_from_reference(mesh, normals, reference);
}

TangentFrames build_frames(const TriMesh& mesh, const Positions& reference) {
  require_faces(mesh);
  if (reference.rows() != mesh.num_vertices()) {
    throw InvalidArgument("reference directions must have one row per vertex");
  }
  std::vector<Vec3> refs(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) refs[v] = reference.row(v).transpose();
  return frames_from_reference(mesh, angle_weighted_normals(mesh), refs);
}

TangentFrames rotate_frames(const TangentFrames& frames, const VectorXd& angles) {
  TangentFrames out = frames;
  for (int v = 0; v < frames.size(); ++v) {
    const double c = std::cos(angles[v]), s = std::sin(angles[v]);
    out.basis_x.row(v) = c * frames.basis_x.row(v) + s * frames.basis_y.row(v);
    out.basis_y.row(v) = -s * frames.basis_x.row(v) + c * frames.basis_y.row(v);
  }
  for (int i = 0; i < frames.size(); ++i) {
    for (int k = frames.offsets[i]; k < frames.offsets[i + 1]; ++k) {
      const int j = frames.adjacency[k];
      out.transport[k] = std::polar(1.0, angles[j] - angles[i]) * frames.transport[k];
    }
  }
  return out;
}

VertexGradientOperator vertex_gradient(const TriMesh& mesh, const TangentFrames& frames) {
  const int n = mesh.num_vertices();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(frames.adjacency.size() + n);
  for (int i = 0; i < n; ++i) {
    const auto ring = mesh.neighbors(i);
    const int d = static_cast<int>(ring.size());
    Eigen::MatrixX2d E(d, 2);
    const Vec3 bx = row3(frames.basis_x, i);
    const Vec3 by = row3(frames.basis_y, i);
    for (int k = 0; k < d; ++k) {
      const Vec3 e = mesh.position(ring[k]) - mesh.position(i);
      E(k, 0) = e.dot(bx);
      E(k, 1) = e.dot(by);
    }
    Eigen::JacobiSVD<Eigen::MatrixX2d> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (d < 2 || !(sv[1] > 1e-10 * sv[0])) {
      throw StructuralError("vertex " + std::to_string(i) +
                            " has rank-deficient projected edge directions");
    }
    // pinv(E) = V S^{-1} U^T, a 2 x d matrix.
    const Eigen::Matrix2Xd pinv =
        svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    Complex diag(0.0, 0.0);
    for (int k = 0; k < d; ++k) {
      const Complex c(pinv(0, k), pinv(1, k));
      triplets.emplace_back(i, ring[k], c);
      diag -= c;
    }
    triplets.emplace_back(i, i, diag);
  }
  VertexGradientOperator G{SparseMatrixc(n, n)};
  G.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return G;
}

DivergenceOperator vertex_divergence(const VertexGradientOperator& gradient,
                                     const MassMatrix& mass) {
  const VectorXc a = mass.diag.cast<Complex>();
  const VectorXc inv = mass.diag.cwiseInverse().cast<Complex>();
  SparseMatrixc adj = gradient.matrix.adjoint();
  DivergenceOperator D{inv.asDiagonal() * adj * a.asDiagonal()};
  return D;
}

DivergenceOperator vertex_divergence(const TriMesh& mesh, const TangentFrames& frames) {
  return vertex_divergence(vertex_gradient(mesh, frames), mass_matrix(mesh));
}

ConnectionLaplacian connection_laplacian(const TriMesh& mesh, const TangentFrames& frames) {
  const auto weights = edge_cotan_weights(mesh);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(4 * weights.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto [i, j] = mesh.edges()[e];
    const double w = weights[e];
    const Complex rij = frames.r(i, j);
    triplets.emplace_back(i, j, -w * rij);
    triplets.emplace_back(j, i, -w * std::conj(rij));
    triplets.emplace_back(i, i, w);
    triplets.emplace_back(j, j, w);
  }
  ConnectionLaplacian L{SparseMatrixc(mesh.num_vertices(), mesh.num_vertices())};
  L.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

void export_field_csv(const std::filesystem::path& path, const TriMesh& mesh,
                      const TangentFrames& frames, const VectorXc& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  const Positions amb = frames.to_ambient(field);
  out << "x,y,z,vx,vy,vz\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 p = mesh.position(v);
    out << p.x() << ',' << p.y() << ',' << p.z() << ',' << amb(v, 0) << ',' << amb(v, 1)
        << ',' << amb(v, 2) << '\n';
  }
}

void export_field_ply(const std::filesystem::path& path, const TriMesh& mesh,
                      const TangentFrames& frames, const VectorXc& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  const Positions amb = frames.to_ambient(field);
  out << "ply\nformat ascii 1.0\nelement vertex " << mesh.num_vertices()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "property double vx\nproperty double vy\nproperty double vz\nelement face "
      << mesh.num_faces() << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 p = mesh.position(v);
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << amb(v, 0) << ' ' << amb(v, 1) << ' '
        << amb(v, 2) << '\n';
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2)
        << '\n';
  }
}

}  // namespace cfmaps
