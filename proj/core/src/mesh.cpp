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

#include "cfmaps/mesh.hpp"

#include "cfmaps/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfmaps {

namespace {

std::string edge_name(int a, int b) {
  std::ostringstream os;
  os << "(" << a << ", " << b << ")";
  return os.str();
}

}  // namespace

std::uint64_t TriMesh::edge_key(int a, int b) const {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

TriMesh::TriMesh(Positions vertices, Faces faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int n = num_vertices();
  for (int v = 0; v < n; ++v) {
    if (!vertices_.row(v).allFinite()) {
      throw StructuralError("vertex " + std::to_string(v) + " has a non-finite position");
    }
  }
  for (int f = 0; f < num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces_(f, c);
      if (v < 0 || v >= n) {
        throw StructuralError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
      }
    }
    if (faces_(f, 0) == faces_(f, 1) || faces_(f, 1) == faces_(f, 2) ||
        faces_(f, 0) == faces_(f, 2)) {
      throw StructuralError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }

  // Half-edge pass: collect directed edges, detect duplicates.
  struct HalfEdge {
    std::uint64_t key;
    int from;
    int to;
    int order;
  };
  std::vector<HalfEdge> half_edges;
  half_edges.reserve(3 * faces_.rows());
  for (int f = 0; f < num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = faces_(f, c);
      const int b = faces_(f, (c + 1) % 3);
      half_edges.push_back({edge_key(a, b), a, b, 3 * f + c});
    }
  }
  std::vector<HalfEdge> sorted = half_edges;
  std::sort(sorted.begin(), sorted.end(), [](const HalfEdge& x, const HalfEdge& y) {
    return x.key != y.key ? x.key < y.key : x.order < y.order;
  });
  std::vector<std::pair<int, int>> first_seen;  // (order, sorted index of group start)
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].key == sorted[i].key) ++j;
    const std::size_t count = j - i;
    if (count > 2) {
      throw StructuralError("non-manifold edge " + edge_name(sorted[i].from, sorted[i].to) +
                            " is shared by " + std::to_string(count) + " faces");
    }
    if (count == 2 && sorted[i].from == sorted[i + 1].from) {
      throw StructuralError("inconsistently oriented faces share edge " +
                            edge_name(sorted[i].from, sorted[i].to));
    }
    first_seen.emplace_back(sorted[i].order, static_cast<int>(i));
    i = j;
  }
  std::sort(first_seen.begin(), first_seen.end());
  edges_.reserve(first_seen.size());
  edge_face_count_.reserve(first_seen.size());
  edge_lookup_.reserve(first_seen.size());
  for (const auto& [order, start] : first_seen) {
    const HalfEdge& h = sorted[start];
    const bool pair =
        static_cast<std::size_t>(start + 1) < sorted.size() && sorted[start + 1].key == h.key;
    edge_lookup_.emplace_back(h.key, static_cast<int>(edges_.size()));
    edges_.push_back({h.from, h.to});
    edge_face_count_.push_back(pair ? 2 : 1);
  }
  std::sort(edge_lookup_.begin(), edge_lookup_.end());

  // One-ring adjacency in order of first appearance.
  std::vector<std::vector<int>> rings(n);
  for (int f = 0; f < num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces_(f, c);
      for (int d : {1, 2}) {
        const int w = faces_(f, (c + d) % 3);
        auto& ring = rings[v];
        if (std::find(ring.begin(), ring.end(), w) == ring.end()) ring.push_back(w);
      }
    }
  }
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + static_cast<int>(rings[v].size());
  adjacency_.reserve(offsets_[n]);
  for (const auto& ring : rings) adjacency_.insert(adjacency_.end(), ring.begin(), ring.end());
}

int TriMesh::edge_index(int a, int b) const {
  const std::uint64_t key = edge_key(a, b);
  auto it = std::lower_bound(edge_lookup_.begin(), edge_lookup_.end(),
                             std::make_pair(key, std::numeric_limits<int>::min()));
  if (it == edge_lookup_.end() || it->first != key) return -1;
  return it->second;
}

bool TriMesh::has_boundary() const {
  return std::any_of(edge_face_count_.begin(), edge_face_count_.end(),
                     [](std::uint8_t c) { return c == 1; });
}

std::vector<double> TriMesh::face_areas() const {
  std::vector<double> areas(num_faces());
  for (int f = 0; f < num_faces(); ++f) {
    const Vec3 a = position(faces_(f, 0));
    const Vec3 b = position(faces_(f, 1));
    const Vec3 c = position(faces_(f, 2));
    areas[f] = 0.5 * (b - a).cross(c - a).norm();
  }
  return areas;
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (double a : face_areas()) sum += a;
  return sum;
}

bool is_degenerate_face(const TriMesh& mesh, int f) {
  const auto& F = mesh.faces();
  const Vec3 a = mesh.position(F(f, 0));
  const Vec3 b = mesh.position(F(f, 1));
  const Vec3 c = mesh.position(F(f, 2));
  const double longest =
      std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
  const double area2 = (b - a).cross(c - a).norm();
  return !(area2 > 1e-12 * longest);
}

SparseMatrixd MassMatrix::sparse() const {
  SparseMatrixd m(size(), size());
  m.reserve(Eigen::VectorXi::Ones(size()));
  for (int i = 0; i < size(); ++i) m.insert(i, i) = diag[i];
  m.makeCompressed();
  return m;
}

MassMatrix mass_matrix(const TriMesh& mesh) {
  MassMatrix mass{VectorXd::Zero(mesh.num_vertices())};
  const auto areas = mesh.face_areas();
  int degenerate = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (is_degenerate_face(mesh, f)) {
      ++degenerate;
      continue;
    }
    for (int c = 0; c < 3; ++c) mass.diag[mesh.faces()(f, c)] += areas[f] / 3.0;
  }
  if (degenerate > 0) {
    warn("zero_area_face", std::to_string(degenerate) +
                               " zero-area face(s) contribute no mass");
  }
  return mass;
}

std::vector<double> edge_cotan_weights(const TriMesh& mesh) {
  std::vector<double> weights(mesh.num_edges(), 0.0);
  const auto& F = mesh.faces();
  int degenerate = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (is_degenerate_face(mesh, f)) {
      ++degenerate;
      continue;
    }
    for (int c = 0; c < 3; ++c) {
      const int k = F(f, c);
      const int i = F(f, (c + 1) % 3);
      const int j = F(f, (c + 2) % 3);
      const Vec3 u = mesh.position(i) - mesh.position(k);
      const Vec3 v = mesh.position(j) - mesh.position(k);
      const double cot = std::clamp(u.dot(v) / u.cross(v).norm(), -kCotanClamp, kCotanClamp);
      weights[mesh.edge_index(i, j)] += 0.5 * cot;
    }
  }
  if (degenerate > 0) {
    warn("zero_area_face", std::to_string(degenerate) +
                               " zero-area face(s) contribute no cotan weight");
  }
  return weights;
}

CotanLaplacian cotan_laplacian(const TriMesh& mesh) {
  const auto weights = edge_cotan_weights(mesh);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * weights.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto [i, j] = mesh.edges()[e];
    const double w = weights[e];
    triplets.emplace_back(i, j, -w);
    triplets.emplace_back(j, i, -w);
    triplets.emplace_back(i, i, w);
    triplets.emplace_back(j, j, w);
  }
  CotanLaplacian W{SparseMatrixd(mesh.num_vertices(), mesh.num_vertices())};
  W.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return W;
}

}  // namespace cfmaps
