#include "sparsecut/metric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace sparsecut {

MetricView::MetricView(const Embedding& embedding, int cache_threshold)
    : embedding_(&embedding), count_(embedding.count()) {
  cached_ = count_ <= cache_threshold;
  if (!cached_) return;
  cache_.resize(static_cast<std::size_t>(count_) * count_);
  for (int i = 0; i < count_; ++i) {
    cache_[static_cast<std::size_t>(i) * count_ + i] = 0.0;
    for (int j = i + 1; j < count_; ++j) {
      const double d =
          (embedding_->points.row(i) - embedding_->points.row(j)).squaredNorm();
      cache_[static_cast<std::size_t>(i) * count_ + j] = d;
      cache_[static_cast<std::size_t>(j) * count_ + i] = d;
    }
  }
}

void MetricView::check_index(int i) const {
  if (i < 0 || i >= count_) throw std::out_of_range("metric index out of range");
}

double MetricView::dist(int i, int j) const {
  check_index(i);
  check_index(j);
  if (cached_) return cache_[static_cast<std::size_t>(i) * count_ + j];
  return (embedding_->points.row(i) - embedding_->points.row(j)).squaredNorm();
}

double MetricView::dist_point_set(int i, std::span<const int> a) const {
  if (a.empty()) throw std::invalid_argument("empty set in dist_point_set");
  double best = std::numeric_limits<double>::infinity();
  for (int j : a) best = std::min(best, dist(i, j));
  return best;
}

double MetricView::dist_set_set(std::span<const int> a,
                                std::span<const int> b) const {
  if (a.empty() || b.empty())
    throw std::invalid_argument("empty set in dist_set_set");
  double best = std::numeric_limits<double>::infinity();
  for (int i : a) best = std::min(best, dist_point_set(i, b));
  return best;
}

std::vector<int> MetricView::ball(int i, double r) const {
  check_index(i);
  if (r < 0.0) throw std::invalid_argument("ball radius must be >= 0");
  std::vector<int> out;
  for (int j = 1; j < count_; ++j)
    if (dist(i, j) <= r) out.push_back(j);
  return out;
}

std::vector<int> MetricView::gamma_k(int i, int k, double delta) const {
  check_index(i);
  if (i == 0) throw std::invalid_argument("gamma_k is defined on nodes");
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  std::vector<char> seen(count_, 0);
  std::vector<int> frontier{i};
  seen[i] = 1;
  for (int hop = 0; hop < k && !frontier.empty(); ++hop) {
    std::vector<int> next;
    for (int u : frontier)
      for (int v = 1; v < count_; ++v)
        if (!seen[v] && dist(u, v) <= delta) {
          seen[v] = 1;
          next.push_back(v);
        }
    frontier = std::move(next);
  }
  std::vector<int> out;
  for (int v = 1; v < count_; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

MetricView::TriangleScan MetricView::validate_triangle(bool include_origin,
                                                       double tol) const {
  (void)tol;  // recorded by callers; the scan itself always reports the max
  TriangleScan scan;
  scan.worst = -std::numeric_limits<double>::infinity();
  const int lo = include_origin ? 0 : 1;
  for (int i = lo; i < count_; ++i)
    for (int j = i + 1; j < count_; ++j) {
      const double dij = dist(i, j);
      for (int k = lo; k < count_; ++k) {
        if (k == i || k == j) continue;
        const double v = dij - dist(i, k) - dist(k, j);
        if (v > scan.worst) {
          scan.worst = v;
          scan.triple = {i, j, k};
        }
      }
    }
  if (scan.triple[0] < 0) scan.worst = 0.0;  // fewer than three points
  return scan;
}

}  // namespace sparsecut
