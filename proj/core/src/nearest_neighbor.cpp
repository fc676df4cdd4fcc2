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

#include "cfmaps/nearest_neighbor.hpp"

#include "cfmaps/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace cfmaps {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double squared_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

/// Same summation as squared_distance, abandoned once it exceeds `bound`.
/// Partial sums only grow, so an abandoned candidate is strictly farther.
inline double bounded_distance(const double* a, const double* b, int dim, double bound) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
    if (s > bound) return s;
  }
  return s;
}

inline bool better(double d, int i, double best_d, int best_i) {
  return d < best_d || (d == best_d && i < best_i);
}

}  // namespace

struct NearestNeighborIndex::Tree {
  struct Node {
    int begin, end;  // range in `order`
    int split_dim = -1;
    double split = 0.0;
    int left = -1, right = -1;
  };

  RowMatrix pts;
  std::vector<int> order;
  std::vector<Node> nodes;
  static constexpr int kLeaf = 12;

  explicit Tree(const MatrixXd& points) : pts(points) {
    order.resize(pts.rows());
    std::iota(order.begin(), order.end(), 0);
    nodes.reserve(2 * pts.rows() / kLeaf + 2);
    build(0, static_cast<int>(order.size()));
  }

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    const int dim = static_cast<int>(pts.cols());
    int best_dim = 0;
    double best_spread = -1.0;
    for (int d = 0; d < dim; ++d) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int k = begin; k < end; ++k) {
        lo = std::min(lo, pts(order[k], d));
        hi = std::max(hi, pts(order[k], d));
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    if (!(best_spread > 0.0)) return id;
    const int mid = (begin + end) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](int a, int b) { return pts(a, best_dim) < pts(b, best_dim); });
    nodes[id].split_dim = best_dim;
    nodes[id].split = pts(order[mid], best_dim);
    // Left holds values <= split, right values >= split (median side).
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

  void search(int id, const double* q, double& best_d, int& best_i) const {
    const Node& node = nodes[id];
    const int dim = static_cast<int>(pts.cols());
    if (node.left < 0) {
      for (int k = node.begin; k < node.end; ++k) {
        const int i = order[k];
        const double d = bounded_distance(q, pts.row(i).data(), dim, best_d);
        if (better(d, i, best_d, best_i)) {
          best_d = d;
          best_i = i;
        }
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split;
    const int near = diff <= 0 ? node.left : node.right;
    const int far = diff <= 0 ? node.right : node.left;
    search(near, q, best_d, best_i);
    // Every point across the plane has a coordinate term at least diff^2.
    if (diff * diff <= best_d) search(far, q, best_d, best_i);
  }
};

NearestNeighborIndex::NearestNeighborIndex(MatrixXd points, int brute_force_below)
    : points_(std::move(points)) {
  if (points_.rows() == 0) throw InvalidArgument("nearest-neighbour index needs points");
  if (points_.rows() >= brute_force_below) tree_ = std::make_unique<Tree>(points_);
}

NearestNeighborIndex::~NearestNeighborIndex() = default;
NearestNeighborIndex::NearestNeighborIndex(NearestNeighborIndex&&) noexcept = default;
NearestNeighborIndex& NearestNeighborIndex::operator=(NearestNeighborIndex&&) noexcept = default;

int NearestNeighborIndex::nearest(const Eigen::Ref<const VectorXd>& query) const {
  if (query.size() != points_.cols()) throw InvalidArgument("query dimension mismatch");
  const VectorXd q = query;
  double best_d = std::numeric_limits<double>::infinity();
  int best_i = std::numeric_limits<int>::max();
  if (tree_) {
    tree_->search(0, q.data(), best_d, best_i);
    return best_i;
  }
  const int dim = static_cast<int>(points_.cols());
  std::vector<double> row(dim);
  for (int i = 0; i < points_.rows(); ++i) {
    for (int d = 0; d < dim; ++d) row[d] = points_(i, d);
    const double dist = squared_distance(q.data(), row.data(), dim);
    if (better(dist, i, best_d, best_i)) {
      best_d = dist;
      best_i = i;
    }
  }
  return best_i;
}

std::vector<int> NearestNeighborIndex::query(const MatrixXd& queries) const {
  if (queries.cols() != points_.cols()) throw InvalidArgument("query dimension mismatch");
  std::vector<int> out(queries.rows());
  if (tree_) {
    const RowMatrix q = queries;
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      double best_d = std::numeric_limits<double>::infinity();
      int best_i = std::numeric_limits<int>::max();
      tree_->search(0, q.row(r).data(), best_d, best_i);
      out[r] = best_i;
    }
    return out;
  }
  return brute_force_nearest(points_, queries);
}

std::vector<int> brute_force_nearest(const MatrixXd& points, const MatrixXd& queries) {
  if (queries.cols() != points.cols()) throw InvalidArgument("query dimension mismatch");
  if (points.rows() == 0) throw InvalidArgument("nearest-neighbour search needs points");
  const RowMatrix p = points;
  const RowMatrix q = queries;
  const int dim = static_cast<int>(p.cols());
  std::vector<int> out(q.rows());
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    double best_d = std::numeric_limits<double>::infinity();
    int best_i = std::numeric_limits<int>::max();
    for (int i = 0; i < p.rows(); ++i) {
      const double d = squared_distance(q.row(r).data(), p.row(i).data(), dim);
      if (better(d, i, best_d, best_i)) {
        best_d = d;
        best_i = i;
      }
    }
    out[r] = best_i;
  }
  return out;
}

std::vector<int> nearest_neighbors(const MatrixXd& points, const MatrixXd& queries) {
  return NearestNeighborIndex(points).query(queries);
}

}  // namespace cfmaps
