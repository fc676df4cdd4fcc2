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
#include <optional>
#include <span>
#include <string_view>

namespace cfmaps {

enum class MeshFormat { off, obj, ply };

/// Format implied by the file extension (case-insensitive), if recognised.
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);
std::optional<MeshFormat> parse_mesh_format(std::string_view name);

/// Loads positions and triangles, preserving file order. Throws FormatError
/// (with line number) on parse failures and StructuralError when the mesh
/// is not an oriented manifold.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

TriMesh parse_off(std::string_view text);
TriMesh parse_obj(std::string_view text);

/// ASCII OFF with 17 significant digits, so that load(save(m)) == m bit for bit.
void save_off(const TriMesh& mesh, const std::filesystem::path& path);
std::string to_off_string(const TriMesh& mesh);

/// Binary little-endian PLY, optionally with per-vertex RGB colours (|V| x 3, 0..255).
void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>* colors = nullptr);

/// Legacy ASCII VTK polydata with named per-vertex scalar fields.
struct VtkScalarField {
  std::string name;
  VectorXd values;
};
void save_vtk(const TriMesh& mesh, const std::filesystem::path& path,
              std::span<const VtkScalarField> fields);

}  // namespace cfmaps
