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

#include <cstdint>
#include <vector>

namespace cfmaps::shapes {

/// Unit-radius icosahedron subdivided `level` times (1-to-4, projected to the
/// sphere). Level L has 10*4^L + 2 vertices. Symmetric under reflection
/// through each coordinate plane.
TriMesh icosphere(int level, double radius = 1.0);

TriMesh tetrahedron();

/// Equilateral triangle with unit side in the z = 0 plane.
TriMesh equilateral_triangle();

/// Regular (nx+1) x (ny+1) vertex grid over [0,width]x[0,height] at z = 0,
/// counter-clockwise about +z.
TriMesh grid(int nx, int ny, double width = 1.0, double height = 1.0);

/// Radially perturbed icosphere with a generic (non-degenerate) spectrum.
TriMesh bumpy_sphere(int level, std::uint64_t seed, double amplitude = 0.25);

/// A closed surface whose only intrinsic symmetry is the reflection x -> -x,
/// together with that symmetry as a vertex map.
struct SymmetricShape {
  TriMesh mesh;
  std::vector<int> reflection;  ///< reflection[v] is the mirror image of v
};
SymmetricShape bilateral_blob(int level, std::uint64_t seed);

/// A copy of a mesh under a similarity transform, with relabelled vertices
/// and reshuffled faces.
struct TransformedCopy {
  TriMesh mesh;
  std::vector<int> to_source;    ///< copy vertex -> source vertex
  std::vector<int> from_source;  ///< source vertex -> copy vertex
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double scale = 1.0;
};

/// Random rotation + translation (+ optional uniform scale), random vertex
/// permutation, face order shuffle and cyclic rotation of face corners.
TransformedCopy rigid_copy(const TriMesh& mesh, std::uint64_t seed, double scale = 1.0,
                           bool permute = true);

/// Mirror image through the x = 0 plane. Faces are re-oriented so normals
/// stay outward; the vertex map is the identity.
TriMesh mirrored(const TriMesh& mesh);

/// Applies a linear map to every vertex position.
TriMesh linearly_transformed(const TriMesh& mesh, const Eigen::Matrix3d& transform);

/// Uniformly random rotation matrix.
Eigen::Matrix3d random_rotation(std::uint64_t seed);

}  // namespace cfmaps::shapes
