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

#include "cfmaps/spectral.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace cfmaps {

/// SHA-256 over vertex positions and face indices.
std::string mesh_content_hash(const TriMesh& mesh);

struct BasisBundle {
  SpectralBasis real;
  ComplexSpectralBasis complex;
};

inline constexpr std::uint32_t kBasisCacheVersion = 1;

void write_basis_bundle(const std::filesystem::path& path, const std::string& mesh_hash,
                        const BasisBundle& bundle);

/// Reads a cache file. Returns nothing if the file is missing, belongs to a
/// different mesh, or holds fewer than `k` pairs; a corrupt file is reported
/// with a "corrupt_cache" warning. Larger caches are truncated to `k`.
std::optional<BasisBundle> read_basis_bundle(const std::filesystem::path& path,
                                             const std::string& mesh_hash, int k);

BasisBundle compute_basis_bundle(const TriMesh& mesh, int k, const EigenOptions& options = {});

/// Directory-backed cache keyed by mesh hash.
class BasisCache {
 public:
  explicit BasisCache(std::filesystem::path directory);

  /// Cache directory from CFMAPS_CACHE_DIR, else a default under the system
  /// temporary directory.
  static std::filesystem::path default_directory();

  BasisBundle get(const TriMesh& mesh, int k, bool* hit = nullptr,
                  const EigenOptions& options = {}) const;

  std::filesystem::path path_for(const std::string& mesh_hash) const;

 private:
  std::filesystem::path directory_;
};

}  // namespace cfmaps
