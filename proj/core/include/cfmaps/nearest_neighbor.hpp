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

#include <memory>
#include <vector>

namespace cfmaps {

/// Exact nearest-neighbour index over the rows of a point matrix. Distances
/// are squared Euclidean sums in coordinate order; ties resolve to the
/// smallest row index.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(MatrixXd points, int brute_force_below = 1000);
  ~NearestNeighborIndex();
  NearestNeighborIndex(NearestNeighborIndex&&) noexcept;
  NearestNeighborIndex& operator=(NearestNeighborIndex&&) noexcept;

  int nearest(const Eigen::Ref<const VectorXd>& query) const;
  std::vector<int> query(const MatrixXd& queries) const;

  bool uses_tree() const { return static_cast<bool>(tree_); }
  int size() const { return static_cast<int>(points_.rows()); }

 private:
  struct Tree;
  MatrixXd points_;  // row-major copy lives in the tree
  std::unique_ptr<Tree> tree_;
};

std::vector<int> brute_force_nearest(const MatrixXd& points, const MatrixXd& queries);

/// Nearest row of `points` for every row of `queries`.
std::vector<int> nearest_neighbors(const MatrixXd& points, const MatrixXd& queries);

}  // namespace cfmaps
