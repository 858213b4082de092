#pragma once

#include <array>
#include <span>
#include <vector>

#include "sparsecut/sdp.hpp"

namespace sparsecut {

// Squared-Euclidean distances over an embedding. Indices are metric indices:
// 0 is the origin point, node i of the graph sits at index i+1. Set-valued
// results contain node indices only (1..n); the origin is a valid center but
// never a member. Immutable after construction; safe for concurrent reads.
class MetricView {
 public:
  // Pairwise cache is built when the point count stays within
  // cache_threshold (quadratic memory).
  explicit MetricView(const Embedding& embedding, int cache_threshold = 4096);

  const Embedding& embedding() const { return *embedding_; }
  int count() const { return count_; }             // n + 1
  int node_count() const { return count_ - 1; }    // n

  double dist(int i, int j) const;

  // min over a in A of dist(i, a); A nonempty
  double dist_point_set(int i, std::span<const int> a) const;
  // min over (a, b) in A x B; both nonempty
  double dist_set_set(std::span<const int> a, std::span<const int> b) const;

  // { j node : dist(i, j) <= r }, sorted ascending
  std::vector<int> ball(int i, double r) const;

  // Nodes reachable from node i via at most k hops of the delta-short
  // relation { d <= delta } among nodes; gamma_k(i, 0, _) = {i}.
  std::vector<int> gamma_k(int i, int k, double delta) const;

  struct TriangleScan {
    double worst = 0.0;               // max of d(i,j) - d(i,k) - d(k,j)
    std::array<int, 3> triple{-1, -1, -1};
    bool valid(double tol) const { return worst <= tol; }
  };
  TriangleScan validate_triangle(bool include_origin, double tol) const;

 private:
  void check_index(int i) const;

  const Embedding* embedding_;
  int count_;
  std::vector<double> cache_;  // row-major pairwise matrix when enabled
  bool cached_;
};

}  // namespace sparsecut
