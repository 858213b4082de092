#pragma once

#include <string>
#include <vector>

#include "sparsecut/graph.hpp"

namespace testutil {

struct CorpusEntry {
  sparsecut::GraphKind kind;
  int n;
  std::uint64_t seed;
  sparsecut::GenParams params;
  std::string name;
};

// Frozen evaluation corpus: 30 generated graphs, n in 6..12, seeds pinned.
// All entries are connected (checked when the list was frozen).
inline const std::vector<CorpusEntry>& corpus() {
  using sparsecut::GraphKind;
  static const std::vector<CorpusEntry> list = {
      {GraphKind::cycle, 6, 0, {}, "cycle:6"},
      {GraphKind::cycle, 7, 0, {}, "cycle:7"},
      {GraphKind::cycle, 8, 0, {}, "cycle:8"},
      {GraphKind::cycle, 9, 0, {}, "cycle:9"},
      {GraphKind::cycle, 10, 0, {}, "cycle:10"},
      {GraphKind::cycle, 11, 0, {}, "cycle:11"},
      {GraphKind::cycle, 12, 0, {}, "cycle:12"},
      {GraphKind::complete, 6, 0, {}, "complete:6"},
      {GraphKind::complete, 9, 0, {}, "complete:9"},
      {GraphKind::complete, 12, 0, {}, "complete:12"},
      {GraphKind::hypercube_graph, 8, 0, {}, "hypercube_graph:8"},
      {GraphKind::planted_bisection, 6, 11, {0.9, 0.15}, "planted:6:s11"},
      {GraphKind::planted_bisection, 6, 12, {0.9, 0.15}, "planted:6:s12"},
      {GraphKind::planted_bisection, 8, 19, {0.9, 0.15}, "planted:8:s19"},
      {GraphKind::planted_bisection, 8, 14, {0.9, 0.15}, "planted:8:s14"},
      {GraphKind::planted_bisection, 10, 15, {0.85, 0.15}, "planted:10:s15"},
      {GraphKind::planted_bisection, 10, 16, {0.85, 0.15}, "planted:10:s16"},
      {GraphKind::planted_bisection, 12, 17, {0.85, 0.1}, "planted:12:s17"},
      {GraphKind::planted_bisection, 12, 18, {0.85, 0.1}, "planted:12:s18"},
      {GraphKind::gnp, 6, 21, {0.6, 0.0}, "gnp:6:s21"},
      {GraphKind::gnp, 6, 22, {0.6, 0.0}, "gnp:6:s22"},
      {GraphKind::gnp, 7, 23, {0.55, 0.0}, "gnp:7:s23"},
      {GraphKind::gnp, 7, 24, {0.55, 0.0}, "gnp:7:s24"},
      {GraphKind::gnp, 8, 32, {0.5, 0.0}, "gnp:8:s32"},
      {GraphKind::gnp, 8, 33, {0.5, 0.0}, "gnp:8:s33"},
      {GraphKind::gnp, 9, 26, {0.5, 0.0}, "gnp:9:s26"},
      {GraphKind::gnp, 9, 27, {0.5, 0.0}, "gnp:9:s27"},
      {GraphKind::gnp, 10, 28, {0.45, 0.0}, "gnp:10:s28"},
      {GraphKind::gnp, 11, 29, {0.45, 0.0}, "gnp:11:s29"},
      {GraphKind::gnp, 12, 30, {0.4, 0.0}, "gnp:12:s30"},
  };
  return list;
}

inline sparsecut::Graph make(const CorpusEntry& e) {
  return sparsecut::generate(e.kind, e.n, e.seed, e.params);
}

inline bool connected(const sparsecut::Graph& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& e : g.edges)
    if (e.cost > 0.0) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
  std::vector<char> seen(g.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == g.n;
}

// Larger instances for the exhaustive triangle-closure check.
inline const std::vector<CorpusEntry>& triangle_corpus() {
  using sparsecut::GraphKind;
  static const std::vector<CorpusEntry> list = {
      {GraphKind::hypercube_graph, 16, 0, {}, "hypercube_graph:16"},
      {GraphKind::planted_bisection, 24, 41, {0.7, 0.08}, "planted:24:s41"},
      {GraphKind::gnp, 32, 42, {0.25, 0.0}, "gnp:32:s42"},
  };
  return list;
}

}  // namespace testutil
