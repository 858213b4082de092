#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparsecut {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double cost = 0.0;
};

// Undirected weighted graph on nodes 0..n-1. Pairs without an explicit edge
// behave as cost-0 edges; they are never materialized.
struct Graph {
  int n = 0;
  std::vector<WeightedEdge> edges;

  double total_cost() const;
};

// Validates and normalizes the edge list. Rejects self-loops, duplicate
// unordered pairs, out-of-range endpoints, negative or non-finite costs,
// and n < 2. Edges are stored with u < v.
Graph build_graph(int n, const std::vector<WeightedEdge>& edges);

struct CutResult {
  std::vector<int> members;      // one side of the cut, sorted ascending
  double cut_cost = 0.0;         // total cost of edges crossing the cut
  std::int64_t separated_pairs = 0;  // |U| * (n - |U|)
  double ratio = 0.0;            // cut_cost / separated_pairs
};

// Cost, separated-pair count and sparsity ratio of the cut (U, V \ U).
// U must be a proper nonempty subset.
CutResult evaluate_cut(const Graph& g, const std::vector<int>& members);

// Exhaustive minimum-ratio cut over all 2^(n-1)-1 proper cuts. Deterministic
// tie-breaking: among minimizers, prefer the cut whose side containing node 0
// is lexicographically smallest; the reported side is the one not containing
// node 0 unless it is the larger side.
CutResult exact_sparsest_cut(const Graph& g, int node_limit = 20);

enum class GraphKind {
  cycle,
  complete,
  planted_bisection,
  gnp,
  hypercube_graph,
};

struct GenParams {
  double p = 0.5;  // in-block edge probability (planted) / edge probability (gnp)
  double q = 0.1;  // cross-block edge probability (planted)
};

GraphKind parse_graph_kind(const std::string& name);
std::string graph_kind_name(GraphKind kind);

// Deterministic generator: identical (kind, n, seed, params) give identical
// graphs. Unit edge costs throughout.
Graph generate(GraphKind kind, int n, std::uint64_t seed,
               const GenParams& params = {});

// Text format: first line "n m", then m lines "i j cost".
Graph read_graph(std::istream& in);
void write_graph(const Graph& g, std::ostream& out);
Graph read_graph_file(const std::string& path);

}  // namespace sparsecut
