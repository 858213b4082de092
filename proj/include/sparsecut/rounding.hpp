#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecut/calibration.hpp"
#include "sparsecut/graph.hpp"
#include "sparsecut/metric.hpp"
#include "sparsecut/sdp.hpp"

namespace sparsecut {

// Minimum-ratio threshold cut over the distance-to-A sweep. Every distinct
// value of d(i, A) is a breakpoint; the best proper cut among them wins,
// ties broken by (ratio, |U|, lexicographic members). A holds graph node
// ids. Returns nullopt when every node has d(i, A) = 0, i.e. no threshold
// yields a proper cut.
std::optional<CutResult> try_sweep_cut(const MetricView& m, const Graph& g,
                                       const std::vector<int>& a);

// Throwing wrapper around try_sweep_cut.
CutResult sweep_cut(const MetricView& m, const Graph& g,
                    const std::vector<int>& a);

// Smallest metric index (origin first, then nodes) whose ball of radius
// s_star/(8n) holds at least a quarter of the nodes; nullopt when none does.
std::optional<int> find_heavy_cluster(const MetricView& m, int s_star);

// Sweep from the heavy ball around i_star (a metric index qualifying per
// find_heavy_cluster).
CutResult heavy_cluster_round(const MetricView& m, const Graph& g, int i_star,
                              int s_star);

struct ScaledInstance {
  std::vector<int> kept;  // original graph node of each scaled node, ascending
  Embedding embedding;    // kept.size() + 1 points, row 0 = origin
  int s_star = 0;

  int node_count() const { return static_cast<int>(kept.size()); }
  int original_node(int scaled_node) const { return kept[scaled_node]; }
};

// Drops nodes whose squared distance to the origin leaves
// [s_star/(8n), 2 s_star/n], then rescales the survivors by sqrt(n/s_star)
// so their squared norms land in [1/8, 2]. Returns nullopt when fewer than
// a quarter of the nodes survive (caller falls back to the heavy path).
std::optional<ScaledInstance> normalize_and_filter(const Embedding& e,
                                                   int s_star);

// Inclusion-wise maximal matching on { (i,j) in L x R : d(i,j) <= delta }.
// L and R are disjoint metric node index sets; pairs are scanned in
// increasing distance with a seed-keyed shuffle within equal distances, so
// the result is deterministic and its size is monotone in delta for a fixed
// seed. Returns matched (i, j) pairs.
std::vector<std::pair<int, int>> greedy_delta_matching(
    const MetricView& m, const std::vector<int>& left,
    const std::vector<int>& right, double delta, std::uint64_t order_seed);

struct SeparatedSets {
  std::vector<int> left;    // original graph node ids, ascending
  std::vector<int> right;
  double delta = 0.0;
  std::uint64_t gaussian_seed = 0;
  int matching_size = 0;
};

struct WssOutcome {
  enum class Stage { success, fail_size, fail_matching };
  Stage stage = Stage::fail_size;
  std::optional<SeparatedSets> sets;
  int left_size = 0;      // |L| before uncovering
  int right_size = 0;
  int matching_size = 0;

  bool ok() const { return stage == Stage::success; }
};

const char* wss_stage_name(WssOutcome::Stage stage);

// One projection round of the separated-sets procedure: draw a Gaussian,
// threshold the projections at -1/+1 into L and R, fail on small sides,
// match delta-close cross pairs, fail on a large matching, and return the
// uncovered remainders (uncovered nodes of R form the right side). Output
// sets are certified: exact pairwise separation > delta and both sizes
// >= ceil(c_prime/2 * n).
WssOutcome well_separated_sets(const ScaledInstance& inst, double delta,
                               double c_prime, std::uint64_t seed);

struct PipelineConfig {
  std::uint64_t seed = 0;
  // delta = kappa / sqrt(log2 n') on the scaled instance
  double delta_kappa = calibration::kDeltaKappa;
  double c_prime = calibration::kCPrime;
  // draws per s_star before giving up on the path
  int gaussian_retries = calibration::kGaussianRetries;
  SolveOptions sdp;
  int size_grid_threshold = 64;  // above this, s_star runs on a power-of-two grid
};

struct PathNote {
  std::string path;     // "heavy" | "separated" | "baseline"
  std::string outcome;  // "cut", "no-center", "filtered-out", "fail:size", ...
  double ratio = -1.0;  // ratio of the candidate cut when one was produced
};

struct SStarDiagnostics {
  int s_star = 0;
  bool relaxed_bounds = false;
  double sdp_objective = 0.0;
  int triangle_rounds = 0;
  std::string sdp_error;  // nonempty when the solve failed
  std::vector<PathNote> outcomes;
  double best_ratio = -1.0;  // best candidate ratio produced under this guess
};

struct PipelineResult {
  CutResult best;
  std::string winner_path;
  int winner_s_star = 0;
  std::vector<SStarDiagnostics> per_s_star;
  // The uncovered right side is read from R, not V; noted here so reports
  // carry the interpretation.
  std::string reading_note =
      "uncovered right side taken from R";
};

struct RoundOutcome {
  std::optional<CutResult> best;
  std::string best_path;
  SStarDiagnostics diagnostics;
};

// Rounding paths for one embedding and one cut-size guess: heavy-cluster
// sweep, separated-sets sweep (up to gaussian_retries draws), and every
// singleton-center sweep.
RoundOutcome round_embedding(const Graph& g, const Embedding& emb, int s_star,
                             const PipelineConfig& config);

// Full rounding pipeline: for every cut-size guess, solve the relaxation,
// factor it, and race the heavy-cluster path, the separated-sets path and
// the singleton-center sweeps; the minimum-ratio cut over everything wins
// with ties broken by (ratio, |U|, lexicographic members).
PipelineResult arv_pipeline(const Graph& g, const PipelineConfig& config);

// true when `a` beats `b` under the pipeline's deterministic cut order
bool cut_order_before(const CutResult& a, const CutResult& b);

}  // namespace sparsecut
