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

#include "cfmaps/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace cfmaps {

/// Oriented manifold triangle mesh, possibly with boundary.
///
/// Construction validates the invariants (indices in range, no repeated
/// vertex in a face, each edge shared by at most two faces traversing it in
/// opposite directions, finite positions) and throws StructuralError naming
/// the offending face or edge otherwise. Immutable afterwards.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(Positions vertices, Faces faces);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_faces() const { return static_cast<int>(faces_.rows()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Positions& vertices() const { return vertices_; }
  const Faces& faces() const { return faces_; }
  Vec3 position(int v) const { return vertices_.row(v).transpose(); }

  /// Undirected edges in order of first appearance; each stored as the first
  /// half-edge seen.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }

  /// Edge index of {a, b}, or -1.
  int edge_index(int a, int b) const;

  /// One-ring neighbours of `v`. The first entry is the head of the first
  /// outgoing half-edge of `v` in face order.
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Number of faces incident to each edge (1 on the boundary).
  const std::vector<std::uint8_t>& edge_face_counts() const { return edge_face_count_; }
  bool has_boundary() const;

  std::vector<double> face_areas() const;
  double total_area() const;

 private:
  std::uint64_t edge_key(int a, int b) const;

  Positions vertices_;
  Faces faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::uint8_t> edge_face_count_;
  std::vector<std::pair<std::uint64_t, int>> edge_lookup_;  // sorted by key
  std::vector<int> offsets_;
  std::vector<int> adjacency_;
};

/// Lumped (barycentric) mass matrix: A_ii = 1/3 of the incident triangle areas.
struct MassMatrix {
  VectorXd diag;

  int size() const { return static_cast<int>(diag.size()); }
  double total() const { return diag.sum(); }
  SparseMatrixd sparse() const;
};

/// Symmetric positive semi-definite cotan Laplacian W, (Wf)_i = sum_j w_ij (f_i - f_j).
struct CotanLaplacian {
  SparseMatrixd matrix;
};

/// Cotangents are clamped to this magnitude.
inline constexpr double kCotanClamp = 1e4;

/// Per-edge cotan weight w_ij = (cot a + cot b) / 2, indexed like TriMesh::edges().
/// Boundary edges carry their single opposite angle. Zero-area faces
/// contribute nothing and raise a `zero_area_face` warning.
std::vector<double> edge_cotan_weights(const TriMesh& mesh);

MassMatrix mass_matrix(const TriMesh& mesh);
CotanLaplacian cotan_laplacian(const TriMesh& mesh);

/// True when the triangle area is negligible relative to its longest edge.
bool is_degenerate_face(const TriMesh& mesh, int f);

}  // namespace cfmaps
