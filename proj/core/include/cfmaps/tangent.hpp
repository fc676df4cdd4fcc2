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

#pragma once

#include "cfmaps/mesh.hpp"

#include <filesystem>
#include <vector>

namespace cfmaps {

/// Per-vertex orthonormal tangent frames. A tangent vector at vertex i is the
/// complex number z with ambient value Re(z) basis_x(i) + Im(z) basis_y(i).
struct TangentFrames {
  Positions basis_x;
  Positions basis_y;
  Positions normal;
  /// transport[k] is r_ij for the k-th entry j of the CSR ring of i, so that
  /// X_i and r_ij X_j are comparable in the frame of i.
  std::vector<Complex> transport;
  std::vector<int> offsets;
  std::vector<int> adjacency;

  int size() const { return static_cast<int>(basis_x.rows()); }

  /// r_ij for an edge {i, j}; throws InvalidArgument when j is not adjacent.
  Complex r(int i, int j) const;

  /// Ambient 3D value of a per-vertex complex field.
  Positions to_ambient(const VectorXc& field) const;
  /// Tangential projection of ambient vectors into frame coordinates.
  VectorXc from_ambient(const Positions& vectors) const;
};

TangentFrames build_frames(const TriMesh& mesh);

/// Frames whose reference directions are the tangential projections of
/// `reference` (one row per vertex).
TangentFrames build_frames(const TriMesh& mesh, const Positions& reference);

/// Rotates frame i in its tangent plane by angles[i] (counter-clockwise about
/// the normal) and updates the transport.
TangentFrames rotate_frames(const TangentFrames& frames, const VectorXd& angles);

std::vector<Vec3> angle_weighted_normals(const TriMesh& mesh);

struct VertexGradientOperator {
  SparseMatrixc matrix;  ///< real function values -> complex vertex tangent vectors

  VectorXc apply(const VectorXd& f) const { return matrix * f.cast<Complex>(); }
};

/// Real part of Dv X is the divergence of X; Dv = A^{-1} G^* A is the adjoint
/// of the gradient for the mass-weighted inner products.
struct DivergenceOperator {
  SparseMatrixc matrix;

  VectorXd apply(const VectorXc& field) const { return (matrix * field).real(); }
};

struct ConnectionLaplacian {
  SparseMatrixc matrix;
};

VertexGradientOperator vertex_gradient(const TriMesh& mesh, const TangentFrames& frames);

DivergenceOperator vertex_divergence(const VertexGradientOperator& gradient,
                                     const MassMatrix& mass);
DivergenceOperator vertex_divergence(const TriMesh& mesh, const TangentFrames& frames);

ConnectionLaplacian connection_laplacian(const TriMesh& mesh, const TangentFrames& frames);

/// Writes one row "x,y,z,vx,vy,vz" per vertex.
void export_field_csv(const std::filesystem::path& path, const TriMesh& mesh,
                      const TangentFrames& frames, const VectorXc& field);

/// ASCII PLY with per-vertex properties vx, vy, vz.
void export_field_ply(const std::filesystem::path& path, const TriMesh& mesh,
                      const TangentFrames& frames, const VectorXc& field);

}  // namespace cfmaps
