#include "sparsecut/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "sparsecut/rng.hpp"

namespace sparsecut {

bool cut_order_before(const CutResult& a, const CutResult& b) {
  if (a.ratio != b.ratio) return a.ratio < b.ratio;
  if (a.members.size() != b.members.size())
    return a.members.size() < b.members.size();
  return std::lexicographical_compare(a.members.begin(), a.members.end(),
                                      b.members.begin(), b.members.end());
}

std::optional<CutResult> try_sweep_cut(const MetricView& m, const Graph& g,
                                       const std::vector<int>& a) {
  if (a.empty()) throw std::invalid_argument("sweep needs a nonempty core");
  if (static_cast<int>(a.size()) >= g.n)
    throw std::invalid_argument("sweep core must not cover every node");
  std::vector<int> a_metric(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a_metric[i] = a[i] + 1;

  const int n = g.n;
  std::vector<double> d(n);
  for (int u = 0; u < n; ++u) d[u] = m.dist_point_set(u + 1, a_metric);

  std::vector<int> order(n);
  for (int u = 0; u < n; ++u) order[u] = u;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (d[x] != d[y]) return d[x] < d[y];
    return x < y;
  });

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back({e.v, e.cost});
    adj[e.v].push_back({e.u, e.cost});
  }

  // Grow U through the distance order, one breakpoint group at a time. The
  // running cost is only a screen; near-ties get re-evaluated exactly below
  // so the winner never depends on accumulated rounding.
  std::vector<char> in(n, 0);
  double cost = 0.0;
  std::vector<std::pair<double, int>> prefixes;  // (rough ratio, prefix size)
  int at = 0;
  while (at < n) {
    int group_end = at;
    while (group_end < n && d[order[group_end]] == d[order[at]]) ++group_end;
    for (int idx = at; idx < group_end; ++idx) {
      const int u = order[idx];
      in[u] = 1;
      for (const auto& [w, c] : adj[u]) cost += in[w] ? -c : c;
    }
    at = group_end;
    if (at == n) break;  // U(r_max) = V, never proper
    prefixes.push_back({cost / static_cast<double>(
                                   static_cast<std::int64_t>(at) * (n - at)),
                        at});
  }
  if (prefixes.empty()) return std::nullopt;  // every node at distance 0

  double best_rough = std::numeric_limits<double>::infinity();
  for (const auto& [rough, prefix] : prefixes)
    best_rough = std::min(best_rough, rough);
  const double band = best_rough + 1e-9 * (1.0 + std::abs(best_rough));
  std::optional<CutResult> best;
  for (const auto& [rough, prefix] : prefixes) {
    if (rough > band) continue;
    std::vector<int> members(order.begin(), order.begin() + prefix);
    std::sort(members.begin(), members.end());
    CutResult cut = evaluate_cut(g, members);
    if (!best || cut_order_before(cut, *best)) best = std::move(cut);
  }
  return best;
}

CutResult sweep_cut(const MetricView& m, const Graph& g,
                    const std::vector<int>& a) {
  auto r = try_sweep_cut(m, g, a);
  if (!r)
    throw std::invalid_argument(
        "no proper threshold cut: every node is at distance 0 from the core");
  return *r;
}

std::optional<int> find_heavy_cluster(const MetricView& m, int s_star) {
  const int n = m.node_count();
  const double radius = static_cast<double>(s_star) / (8.0 * n);
  for (int i = 0; i < m.count(); ++i) {
    if (4 * static_cast<int>(m.ball(i, radius).size()) >= n) return i;
  }
  return std::nullopt;
}

CutResult heavy_cluster_round(const MetricView& m, const Graph& g, int i_star,
                              int s_star) {
  const int n = m.node_count();
  const double radius = static_cast<double>(s_star) / (8.0 * n);
  auto ball = m.ball(i_star, radius);
  if (4 * static_cast<int>(ball.size()) < n)
    throw std::invalid_argument("center does not qualify as heavy");
  std::vector<int> a(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) a[i] = ball[i] - 1;
  return sweep_cut(m, g, a);
}

std::optional<ScaledInstance> normalize_and_filter(const Embedding& e,
                                                   int s_star) {
  const int n = e.node_count();
  if (s_star < 1 || s_star > n / 2)
    throw std::invalid_argument("s_star must lie in [1, n/2]");
  const double s = static_cast<double>(s_star);
  const double lo = 0.125 * s / n;
  const double hi = 2.0 * s / n;

  std::vector<int> kept;
  for (int u = 0; u < n; ++u) {
    const double d0 = e.points.row(u + 1).squaredNorm();
    if (d0 >= lo && d0 <= hi) kept.push_back(u);
  }
  if (4 * static_cast<int>(kept.size()) < n) return std::nullopt;

  ScaledInstance inst;
  inst.s_star = s_star;
  inst.kept = std::move(kept);
  const double scale = std::sqrt(static_cast<double>(n) / s);
  inst.embedding.points =
      Eigen::MatrixXd::Zero(inst.node_count() + 1, e.dim());
  for (int k = 0; k < inst.node_count(); ++k)
    inst.embedding.points.row(k + 1) = e.points.row(inst.kept[k] + 1) * scale;
  return inst;
}

std::vector<std::pair<int, int>> greedy_delta_matching(
    const MetricView& m, const std::vector<int>& left,
    const std::vector<int>& right, double delta, std::uint64_t order_seed) {
  {
    std::set<int> l(left.begin(), left.end());
    for (int r : right)
      if (l.count(r))
        throw std::invalid_argument("matching sides must be disjoint");
  }
  struct Cand {
    double d;
    std::uint64_t key;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i : left)
    for (int j : right) {
      const double d = m.dist(i, j);
      if (d <= delta) {
        const std::uint64_t key =
            mix64(order_seed, (static_cast<std::uint64_t>(i) << 32) |
                                  static_cast<std::uint32_t>(j));
        cands.push_back({d, key, i, j});
      }
    }
  // Distance-major order keeps the scan prefix stable when delta grows.
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.key != b.key) return a.key < b.key;
    return std::pair{a.i, a.j} < std::pair{b.i, b.j};
  });
  std::set<int> used;
  std::vector<std::pair<int, int>> out;
  for (const auto& c : cands) {
    if (used.count(c.i) || used.count(c.j)) continue;
    used.insert(c.i);
    used.insert(c.j);
    out.push_back({c.i, c.j});
  }
  return out;
}

const char* wss_stage_name(WssOutcome::Stage stage) {
  switch (stage) {
    case WssOutcome::Stage::success: return "success";
    case WssOutcome::Stage::fail_size: return "fail:size";
    case WssOutcome::Stage::fail_matching: return "fail:matching";
  }
  return "?";
}

WssOutcome well_separated_sets(const ScaledInstance& inst, double delta,
                               double c_prime, std::uint64_t seed) {
  if (!(c_prime > 0.0 && c_prime < 1.0))
    throw std::invalid_argument("c_prime must lie in (0, 1)");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");

  const int n = inst.node_count();
  const int m = inst.embedding.dim();
  MetricView metric(inst.embedding);

  SplitRng rng = SplitRng(seed).split(0x6761757373ULL);
  Eigen::VectorXd g(m);
  for (int c = 0; c < m; ++c) g(c) = rng.next_gaussian();

  WssOutcome out;
  std::vector<int> left, right;  // metric node indices
  for (int k = 0; k < n; ++k) {
    const double proj = inst.embedding.points.row(k + 1).dot(g);
    if (proj <= -1.0) left.push_back(k + 1);
    else if (proj >= 1.0) right.push_back(k + 1);
  }
  out.left_size = static_cast<int>(left.size());
  out.right_size = static_cast<int>(right.size());
  const double floor = c_prime * n;
  if (out.left_size <= floor || out.right_size <= floor) {
    out.stage = WssOutcome::Stage::fail_size;
    return out;
  }

  auto matching =
      greedy_delta_matching(metric, left, right, delta, mix64(seed, 1));
  out.matching_size = static_cast<int>(matching.size());
  if (out.matching_size > 0.5 * c_prime * n) {
    out.stage = WssOutcome::Stage::fail_matching;
    return out;
  }

  std::set<int> covered;
  for (const auto& [i, j] : matching) {
    covered.insert(i);
    covered.insert(j);
  }
  SeparatedSets sets;
  sets.delta = delta;
  sets.gaussian_seed = seed;
  sets.matching_size = out.matching_size;
  std::vector<int> lm, rm;
  for (int i : left)
    if (!covered.count(i)) lm.push_back(i);
  for (int j : right)
    if (!covered.count(j)) rm.push_back(j);

  // Certificates. Maximality forces separation; verify both anyway so a
  // returned value is self-evidencing.
  if (metric.dist_set_set(lm, rm) <= delta)
    throw std::logic_error("uncovered cross pair within delta after matching");
  const auto need =
      static_cast<std::size_t>(std::ceil(0.5 * c_prime * n));
  if (lm.size() < need || rm.size() < need)
    throw std::logic_error("separated sides smaller than certified floor");

  for (int i : lm) sets.left.push_back(inst.original_node(i - 1));
  for (int j : rm) sets.right.push_back(inst.original_node(j - 1));
  out.sets = std::move(sets);
  out.stage = WssOutcome::Stage::success;
  return out;
}

RoundOutcome round_embedding(const Graph& g, const Embedding& emb, int s_star,
                             const PipelineConfig& config) {
  const int n = g.n;
  RoundOutcome out;
  out.diagnostics.s_star = s_star;
  MetricView metric(emb);

  auto note = [&](std::string path, std::string outcome, double ratio) {
    out.diagnostics.outcomes.push_back(
        {std::move(path), std::move(outcome), ratio});
    if (ratio >= 0.0 && (out.diagnostics.best_ratio < 0.0 ||
                         ratio < out.diagnostics.best_ratio))
      out.diagnostics.best_ratio = ratio;
  };
  auto offer = [&](const CutResult& cut, const std::string& path) {
    if (!out.best || cut_order_before(cut, *out.best)) {
      out.best = cut;
      out.best_path = path;
    }
  };

  if (auto center = find_heavy_cluster(metric, s_star)) {
    const double radius = static_cast<double>(s_star) / (8.0 * n);
    auto ball = metric.ball(*center, radius);
    if (static_cast<int>(ball.size()) == n) {
      note("heavy", "ball-covers-everything", -1.0);
    } else {
      std::vector<int> a(ball.size());
      for (std::size_t i = 0; i < ball.size(); ++i) a[i] = ball[i] - 1;
      if (auto cut = try_sweep_cut(metric, g, a)) {
        note("heavy", "cut", cut->ratio);
        offer(*cut, "heavy");
      } else {
        note("heavy", "degenerate-sweep", -1.0);
      }
    }
  } else {
    note("heavy", "no-center", -1.0);
  }

  if (auto scaled = normalize_and_filter(emb, s_star)) {
    const double log2n =
        std::log2(static_cast<double>(std::max(scaled->node_count(), 2)));
    const double delta = config.delta_kappa / std::sqrt(log2n);
    const std::uint64_t base = mix64(config.seed, 0x73737461ULL + s_star);
    bool landed = false;
    for (int attempt = 0; attempt < config.gaussian_retries; ++attempt) {
      auto wss =
          well_separated_sets(*scaled, delta, config.c_prime, mix64(base, attempt));
      if (!wss.ok()) continue;
      landed = true;
      if (auto cut = try_sweep_cut(metric, g, wss.sets->left)) {
        note("separated", "cut", cut->ratio);
        offer(*cut, "separated");
      } else {
        note("separated", "degenerate-sweep", -1.0);
      }
      break;
    }
    if (!landed) note("separated", "fail:all-retries", -1.0);
  } else {
    note("separated", "filtered-out", -1.0);
  }

  {
    std::optional<CutResult> best_single;
    for (int u = 0; u < n; ++u) {
      if (auto cut = try_sweep_cut(metric, g, {u})) {
        if (!best_single || cut_order_before(*cut, *best_single))
          best_single = *cut;
      }
    }
    if (best_single) {
      note("baseline", "cut", best_single->ratio);
      offer(*best_single, "baseline");
    } else {
      note("baseline", "degenerate-sweep", -1.0);
    }
  }
  return out;
}

PipelineResult arv_pipeline(const Graph& g, const PipelineConfig& config) {
  if (g.n < 4) throw std::invalid_argument("pipeline needs n >= 4");
  const int n = g.n;

  std::vector<std::pair<int, bool>> guesses;  // (s_star, relaxed bounds)
  if (n <= config.size_grid_threshold) {
    for (int s = 1; s <= n / 2; ++s) guesses.push_back({s, false});
  } else {
    for (int s = 1; s <= n / 2; s *= 2) guesses.push_back({s, true});
    if (guesses.empty() || guesses.back().first != n / 2)
      guesses.push_back({n / 2, true});
  }

  PipelineResult result;
  std::optional<CutResult> best;
  std::string best_path;
  int best_s = 0;
  int solve_failures = 0;
  std::string first_error;

  for (const auto& [s_star, relaxed] : guesses) {
    SdpSolution sol;
    try {
      sol = solve_sdp(build_relaxation(g, s_star, relaxed), config.sdp);
    } catch (const std::exception& ex) {
      SStarDiagnostics diag;
      diag.s_star = s_star;
      diag.relaxed_bounds = relaxed;
      diag.sdp_error = ex.what();
      if (first_error.empty()) first_error = ex.what();
      ++solve_failures;
      result.per_s_star.push_back(std::move(diag));
      continue;
    }

    Embedding emb = gram_to_vectors(sol, 1e-8, 10.0 * config.sdp.eps_psd);
    RoundOutcome rounded = round_embedding(g, emb, s_star, config);
    rounded.diagnostics.relaxed_bounds = relaxed;
    rounded.diagnostics.sdp_objective = sol.objective_value;
    rounded.diagnostics.triangle_rounds = sol.triangle_rounds;
    if (rounded.best &&
        (!best || cut_order_before(*rounded.best, *best))) {
      best = rounded.best;
      best_path = rounded.best_path;
      best_s = s_star;
    }
    result.per_s_star.push_back(std::move(rounded.diagnostics));
  }

  if (!best) {
    if (solve_failures == static_cast<int>(guesses.size()))
      throw SolverError("relaxation failed for every cut-size guess: " +
                        first_error);
    throw SolverError("no rounding path produced a proper cut");
  }
  result.best = *best;
  result.winner_path = best_path;
  result.winner_s_star = best_s;
  return result;
}

}  // namespace sparsecut
