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

#include "cfmaps/shapes.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_map>

namespace cfmaps::shapes {

namespace {

TriMesh from_vectors(const std::vector<Vec3>& pts, const std::vector<std::array<int, 3>>& tris) {
  Positions V(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = pts[i];
  Faces F(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    F.row(static_cast<Eigen::Index>(i)) << tris[i][0], tris[i][1], tris[i][2];
  }
  return TriMesh(std::move(V), std::move(F));
}

TriMesh with_positions(const TriMesh& mesh, Positions V) {
  return TriMesh(std::move(V), mesh.faces());
}

}  // namespace

TriMesh icosphere(int level, double radius) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& p : pts) p.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pts.push_back((0.5 * (pts[a] + pts[b])).normalized());
      const int id = static_cast<int>(pts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  for (auto& p : pts) p *= radius;
  return from_vectors(pts, tris);
}

TriMesh tetrahedron() {
  std::vector<Vec3> pts = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return from_vectors(pts, tris);
}

TriMesh equilateral_triangle() {
  std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
  return from_vectors(pts, {{0, 1, 2}});
}

TriMesh grid(int nx, int ny, double width, double height) {
  std::vector<Vec3> pts;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) pts.emplace_back(width * i / nx, height * j / ny, 0.0);
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return from_vectors(pts, tris);
}

TriMesh bumpy_sphere(int level, std::uint64_t seed, double amplitude) {
  const TriMesh base = icosphere(level);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<Vec3> centers;
  std::vector<double> heights;
  for (int m = 0; m < 6; ++m) {
    centers.push_back(Vec3(normal(rng), normal(rng), normal(rng)).normalized());
    heights.push_back(uniform(rng));
  }
  Positions V = base.vertices();
  for (int v = 0; v < V.rows(); ++v) {
    const Vec3 p = V.row(v).transpose();
    double h = 0.0;
    for (std::size_t m = 0; m < centers.size(); ++m) {
      h += heights[m] * std::exp(-(p - centers[m]).squaredNorm() / 0.5);
    }
    V.row(v) = (p * (1.0 + amplitude * h)).transpose();
  }
  return with_positions(base, std::move(V));
}

SymmetricShape bilateral_blob(int level, std::uint64_t seed) {
  const TriMesh base = icosphere(level);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.75, 1.25);
  // Even in x, generic in (y, z): the reflection x -> -x is the only symmetry.
  const double cy = 0.22 * jitter(rng), cz = 0.12 * jitter(rng), cyz = 0.20 * jitter(rng);
  const double cxx = 0.25 * jitter(rng), cyyz = 0.15 * jitter(rng), cxxy = 0.18 * jitter(rng);
  Positions V = base.vertices();
  for (int v = 0; v < V.rows(); ++v) {
    const double x = V(v, 0), y = V(v, 1), z = V(v, 2);
    const double h = cy * y + cz * z + cyz * y * z + cxx * x * x + cyyz * y * y * z +
                     cxxy * x * x * y;
    V.row(v) *= 1.0 + h;
  }
  // The base icosphere is exactly mirror symmetric, so mirror images match
  // bit for bit.
  std::map<std::tuple<double, double, double>, int> lookup;
  for (int v = 0; v < base.num_vertices(); ++v) {
    lookup.emplace(std::make_tuple(base.vertices()(v, 0), base.vertices()(v, 1),
                                   base.vertices()(v, 2)),
                   v);
  }
  std::vector<int> reflection(base.num_vertices());
  for (int v = 0; v < base.num_vertices(); ++v) {
    reflection[v] = lookup.at(std::make_tuple(-base.vertices()(v, 0), base.vertices()(v, 1),
                                              base.vertices()(v, 2)));
  }
  return {with_positions(base, std::move(V)), std::move(reflection)};
}

Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::Matrix3d g;
  for (int i = 0; i < 9; ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
  Eigen::Matrix3d q = qr.householderQ();
  const Eigen::Vector3d d = qr.matrixQR().diagonal();
  for (int i = 0; i < 3; ++i) {
    if (d[i] < 0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

TransformedCopy rigid_copy(const TriMesh& mesh, std::uint64_t seed, double scale, bool permute) {
  std::mt19937_64 rng(seed);
  const Eigen::Matrix3d R = random_rotation(rng());
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const Vec3 translation(uniform(rng), uniform(rng), uniform(rng));
  const int n = mesh.num_vertices();

  std::vector<int> to_source(n);
  std::iota(to_source.begin(), to_source.end(), 0);
  std::vector<int> face_order(mesh.num_faces());
  std::iota(face_order.begin(), face_order.end(), 0);
  if (permute) {
    std::shuffle(to_source.begin(), to_source.end(), rng);
    std::shuffle(face_order.begin(), face_order.end(), rng);
  }
  std::vector<int> from_source(n);
  for (int t = 0; t < n; ++t) from_source[to_source[t]] = t;

  Positions V(n, 3);
  for (int t = 0; t < n; ++t) {
    V.row(t) = (scale * (R * mesh.position(to_source[t])) + translation).transpose();
  }
  Faces F(mesh.num_faces(), 3);
  std::uniform_int_distribution<int> corner(0, 2);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const int src = face_order[f];
    const int shift = permute ? corner(rng) : 0;
    for (int c = 0; c < 3; ++c) F(f, c) = from_source[mesh.faces()(src, (c + shift) % 3)];
  }
  TransformedCopy copy{TriMesh(std::move(V), std::move(F)), std::move(to_source),
                       std::move(from_source), R, scale};
  return copy;
}

TriMesh mirrored(const TriMesh& mesh) {
  Positions V = mesh.vertices();
  V.col(0) *= -1.0;
  Faces F = mesh.faces();
  F.col(1).swap(F.col(2));
  return TriMesh(std::move(V), std::move(F));
}

TriMesh linearly_transformed(const TriMesh& mesh, const Eigen::Matrix3d& transform) {
  Positions V = mesh.vertices();
  for (int v = 0; v < V.rows(); ++v) V.row(v) = (transform * mesh.position(v)).transpose();
  return TriMesh(std::move(V), mesh.faces());
}

}  // namespace cfmaps::shapes
