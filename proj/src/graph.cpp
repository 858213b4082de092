#include "sparsecut/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sparsecut/rng.hpp"

namespace sparsecut {

double Graph::total_cost() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.cost;
  return s;
}

Graph build_graph(int n, const std::vector<WeightedEdge>& edges) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  Graph g;
  g.n = n;
  g.edges.reserve(edges.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop rejected");
    if (!std::isfinite(e.cost) || e.cost < 0.0)
      throw std::invalid_argument("edge cost must be finite and >= 0");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate edge rejected");
    g.edges.push_back({key.first, key.second, e.cost});
  }
  return g;
}

namespace {

std::vector<char> membership_mask(const Graph& g, const std::vector<int>& members) {
  std::vector<char> in(g.n, 0);
  for (int u : members) {
    if (u < 0 || u >= g.n) throw std::invalid_argument("cut member out of range");
    in[u] = 1;
  }
  return in;
}

CutResult cut_from_mask(const Graph& g, const std::vector<char>& in) {
  CutResult r;
  int size = 0;
  for (int u = 0; u < g.n; ++u)
    if (in[u]) {
      r.members.push_back(u);
      ++size;
    }
  if (size == 0 || size == g.n)
    throw std::invalid_argument("cut side must be a proper nonempty subset");
  for (const auto& e : g.edges)
    if (in[e.u] != in[e.v]) r.cut_cost += e.cost;
  r.separated_pairs = static_cast<std::int64_t>(size) * (g.n - size);
  r.ratio = r.cut_cost / static_cast<double>(r.separated_pairs);
  return r;
}

}  // namespace

CutResult evaluate_cut(const Graph& g, const std::vector<int>& members) {
  return cut_from_mask(g, membership_mask(g, members));
}

CutResult exact_sparsest_cut(const Graph& g, int node_limit) {
  if (g.n > node_limit)
    throw std::invalid_argument("graph too large for exhaustive cut search");

  // Adjacency for incremental cost updates while Gray-coding over subsets
  // of nodes 1..n-1 (node 0 stays on the fixed side).
  std::vector<std::vector<std::pair<int, double>>> adj(g.n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back({e.v, e.cost});
    adj[e.v].push_back({e.u, e.cost});
  }

  const int n = g.n;
  std::vector<char> in(n, 0);  // side not containing node 0
  double cost = 0.0;
  bool have_best = false;
  double best_ratio = 0.0;
  double best_cost = 0.0;
  int best_size = 0;
  // Side containing node 0 of the current best, used for lexicographic ties.
  std::vector<int> best_zero_side;

  auto zero_side_of = [&](const std::vector<char>& mask) {
    std::vector<int> side;
    for (int u = 0; u < n; ++u)
      if (!mask[u]) side.push_back(u);
    return side;
  };

  auto consider = [&](int size) {
    const double denom =
        static_cast<double>(static_cast<std::int64_t>(size) * (n - size));
    const double rough = cost / denom;
    // Fast reject on the running accumulator; near-ties fall through to an
    // exact recompute so tie-breaking never depends on accumulated dust.
    if (have_best && rough > best_ratio + 1e-9 * (1.0 + std::abs(best_ratio)))
      return;
    double exact_cost = 0.0;
    for (const auto& e : g.edges)
      if (in[e.u] != in[e.v]) exact_cost += e.cost;
    const double ratio = exact_cost / denom;
    if (have_best && ratio > best_ratio) return;
    if (have_best && ratio == best_ratio) {
      auto zs = zero_side_of(in);
      if (!std::lexicographical_compare(zs.begin(), zs.end(),
                                        best_zero_side.begin(),
                                        best_zero_side.end()))
        return;
      best_zero_side = std::move(zs);
      best_cost = exact_cost;
      best_size = size;
      return;
    }
    have_best = true;
    best_ratio = ratio;
    best_cost = exact_cost;
    best_size = size;
    best_zero_side = zero_side_of(in);
  };

  // Gray-code walk over subsets of {1..n-1}: one node flips per step.
  const std::uint64_t total = 1ULL << (n - 1);
  int size = 0;
  for (std::uint64_t it = 1; it < total; ++it) {
    const int bit = static_cast<int>(__builtin_ctzll(it));
    const int node = bit + 1;
    const bool entering = !in[node];
    in[node] = entering ? 1 : 0;
    size += entering ? 1 : -1;
    for (const auto& [w, c] : adj[node]) {
      // Edge (node, w) starts or stops crossing the cut.
      const bool crosses_now = in[node] != in[w];
      cost += crosses_now ? c : -c;
    }
    if (cost < 0.0 && cost > -1e-12) cost = 0.0;  // guard accumulated dust
    if (size > 0) consider(size);
  }

  // Rebuild the winning mask from its zero-side representation.
  std::vector<char> win(n, 1);
  for (int u : best_zero_side) win[u] = 0;
  CutResult r;
  for (int u = 0; u < n; ++u)
    if (win[u]) r.members.push_back(u);
  r.cut_cost = best_cost;
  r.separated_pairs = static_cast<std::int64_t>(best_size) * (n - best_size);
  r.ratio = best_ratio;
  // Report the zero-free side unless it is the larger side.
  if (2 * best_size > n) {
    r.members = best_zero_side;
  }
  // Recompute cost exactly from the final mask; the Gray-code accumulator can
  // carry rounding dust across half a million flips.
  {
    std::vector<char> mask(n, 0);
    for (int u : r.members) mask[u] = 1;
    CutResult exact = cut_from_mask(g, mask);
    r.cut_cost = exact.cut_cost;
    r.separated_pairs = exact.separated_pairs;
    r.ratio = exact.ratio;
  }
  return r;
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "cycle") return GraphKind::cycle;
  if (name == "complete") return GraphKind::complete;
  if (name == "planted_bisection") return GraphKind::planted_bisection;
  if (name == "gnp") return GraphKind::gnp;
  if (name == "hypercube_graph") return GraphKind::hypercube_graph;
  throw std::invalid_argument("unknown graph kind: " + name);
}

std::string graph_kind_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::cycle: return "cycle";
    case GraphKind::complete: return "complete";
    case GraphKind::planted_bisection: return "planted_bisection";
    case GraphKind::gnp: return "gnp";
    case GraphKind::hypercube_graph: return "hypercube_graph";
  }
  return "?";
}

Graph generate(GraphKind kind, int n, std::uint64_t seed,
               const GenParams& params) {
  std::vector<WeightedEdge> edges;
  switch (kind) {
    case GraphKind::cycle: {
      if (n < 2) throw std::invalid_argument("cycle needs n >= 2");
      if (n == 2) {
        edges.push_back({0, 1, 1.0});
        break;
      }
      for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
      break;
    }
    case GraphKind::complete: {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
      break;
    }
    case GraphKind::planted_bisection: {
      if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("planted_bisection needs even n >= 4");
      if (!(params.p > params.q) || params.p > 1.0 || params.q < 0.0)
        throw std::invalid_argument("planted_bisection needs 0 <= q < p <= 1");
      SplitRng rng(mix64(seed, 0x706c616e74ULL));
      const int half = n / 2;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const bool same = (i < half) == (j < half);
          const double prob = same ? params.p : params.q;
          if (rng.next_double() < prob) edges.push_back({i, j, 1.0});
        }
      break;
    }
    case GraphKind::gnp: {
      if (!(params.p >= 0.0 && params.p <= 1.0))
        throw std::invalid_argument("gnp needs p in [0,1]");
      SplitRng rng(mix64(seed, 0x676e70ULL));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.next_double() < params.p) edges.push_back({i, j, 1.0});
      break;
    }
    case GraphKind::hypercube_graph: {
      int d = 0;
      while ((1 << d) < n) ++d;
      if ((1 << d) != n)
        throw std::invalid_argument("hypercube_graph needs n a power of two");
      for (int i = 0; i < n; ++i)
        for (int b = 0; b < d; ++b) {
          const int j = i ^ (1 << b);
          if (i < j) edges.push_back({i, j, 1.0});
        }
      break;
    }
  }
  return build_graph(n, edges);
}

Graph read_graph(std::istream& in) {
  int n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("bad graph header");
  std::vector<WeightedEdge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    WeightedEdge e;
    if (!(in >> e.u >> e.v >> e.cost))
      throw std::invalid_argument("bad edge line");
    edges.push_back(e);
  }
  return build_graph(n, edges);
}

void write_graph(const Graph& g, std::ostream& out) {
  out << g.n << " " << g.edges.size() << "\n";
  out.precision(17);
  for (const auto& e : g.edges)
    out << e.u << " " << e.v << " " << e.cost << "\n";
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read_graph(in);
}

}  // namespace sparsecut
