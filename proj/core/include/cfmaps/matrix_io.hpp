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

#include <filesystem>

namespace cfmaps {

/// CSV: first line "rows,cols", then one row per line. Complex matrices
/// interleave real and imaginary parts column by column.
void save_matrix_csv(const std::filesystem::path& path, const MatrixXd& m);
void save_matrix_csv(const std::filesystem::path& path, const MatrixXc& m);
MatrixXd load_matrix_csv(const std::filesystem::path& path);
MatrixXc load_complex_matrix_csv(const std::filesystem::path& path);

/// Versioned binary with a SHA-256 trailer.
void save_matrix_bin(const std::filesystem::path& path, const MatrixXd& m);
void save_matrix_bin(const std::filesystem::path& path, const MatrixXc& m);
MatrixXd load_matrix_bin(const std::filesystem::path& path);
MatrixXc load_complex_matrix_bin(const std::filesystem::path& path);

}  // namespace cfmaps
