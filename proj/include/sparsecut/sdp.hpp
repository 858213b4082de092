#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsecut/graph.hpp"

namespace sparsecut {

// All constraint functionals act on the (n+1)x(n+1) Gram matrix X whose
// index 0 is the artificial origin; node i of the graph is row i+1.
// A term contributes coeff * X(i, j) (X symmetric, each unordered pair
// referenced once with i <= j).
struct LinearTerm {
  int i = 0;
  int j = 0;
  double coeff = 0.0;
};

struct LinearFunctional {
  std::vector<LinearTerm> terms;

  double eval(const Eigen::MatrixXd& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coeff * x(t.i, t.j);
    return s;
  }

  // Appends the expansion of coeff * ||v_i - v_j||^2.
  void add_distance(int i, int j, double coeff);
};

enum class Sense { eq, le };

struct Constraint {
  LinearFunctional f;
  Sense sense = Sense::eq;
  double rhs = 0.0;
  std::string label;
};

struct ConstraintSystem {
  int dim = 0;     // n + 1, index 0 is the artificial origin
  int s_star = 0;  // guessed cut size
  bool relaxed_size_bounds = false;    // size rows are factor-2 bands
  LinearFunctional objective;          // minimized: sum of c_ij * d(i,j)
  std::vector<Constraint> constraints; // triangle rows get appended lazily

  int count_equalities() const;
  int count_inequalities() const;
};

// The relaxation over the Gram matrix: total squared norm pinned to s_star,
// total pairwise squared distance pinned to s_star*(n-s_star), unit norm
// caps, origin pinned to zero. Triangle rows start empty and are generated
// on demand during the solve. With relaxed_size_bounds the two pinning
// equalities become two-sided bounds with slack factor 2 (used when cut
// sizes are enumerated on a coarse grid).
ConstraintSystem build_relaxation(const Graph& g, int s_star,
                                  bool relaxed_size_bounds = false);

struct TriangleViolation {
  int i = 0;  // endpoints, i < j
  int j = 0;
  int k = 0;  // midpoint
  double violation = 0.0;  // d(i,j) - d(i,k) - d(k,j)
};

// Scans all ordered triples over V u {0} for squared-distance triangle
// violations above tol, returning at most `budget` of them sorted by
// decreasing violation. An empty result certifies closure to within tol.
std::vector<TriangleViolation> separate_triangles(const Eigen::MatrixXd& gram,
                                                  int budget, double tol);

struct ResidualReport {
  double total_norm = 0.0;       // residual of the squared-norm sum row
  double total_dist = 0.0;       // residual of the pairwise-distance sum row
  double max_norm_cap = 0.0;     // worst positive violation of a norm cap
  double origin_norm = 0.0;      // squared norm of the origin point
  double max_triangle = 0.0;     // worst violation among triangle rows present
  std::array<int, 3> worst_triple{-1, -1, -1};
  double max_violation() const;
};

struct SdpSolution {
  Eigen::MatrixXd gram;         // (n+1)x(n+1), origin row/column zero
  double objective_value = 0.0;
  double max_eig_neg = 0.0;     // magnitude of the most negative eigenvalue
  ResidualReport residuals;
  int triangle_rounds = 0;
  int active_triangles = 0;
  long iterations = 0;
  int s_star = 0;
  double worst_triangle_exhaustive = 0.0;  // full-scan certificate
};

struct SolveOptions {
  double eps_feas = 1e-6;
  double eps_psd = 1e-8;
  double eps_gap = 1e-4;  // duality-gap certificate target (absolute)
  int max_rounds = 50;    // triangle separation rounds
  int budget = 0;         // violated triples added per round; 0 means 5*n
  long max_iters = 400000;  // inner iterations per round
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::string> certificate)
      : std::runtime_error(what), violated(std::move(certificate)) {}
  std::vector<std::string> violated;  // labels of the irreconcilable rows
};

class SolverError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Splitting solver on the reduced n x n Gram block (the origin row is
// eliminated structurally). Alternates a PSD eigenvalue projection with an
// affine correction under scaled dual updates; triangle rows are separated
// lazily between inner solves. Throws InfeasibleError when the equality rows
// are mutually inconsistent and SolverError when tolerances cannot be met
// within the iteration budget.
SdpSolution solve_sdp(const ConstraintSystem& sys, const SolveOptions& opts = {});

// Point set realizing a Gram matrix: row p of `points` is the vector of
// metric index p (0 = origin, node i at row i+1).
struct Embedding {
  Eigen::MatrixXd points;

  int count() const { return static_cast<int>(points.rows()); }
  int node_count() const { return count() - 1; }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Eigendecomposition factor of the Gram matrix. Eigenvalues in
// [-eps_psd, 0) are clamped to zero; anything more negative is an error.
// Column signs are canonicalized so factorization is deterministic.
Embedding gram_to_vectors(const SdpSolution& sol, double eps_factor = 1e-8,
                          double eps_psd = 1e-8);

// One-dimensional 0/1 embedding of an integral cut; satisfies every
// relaxation row exactly with s_star = |members|.
Embedding embed_integral_cut(const Graph& g, const std::vector<int>& members);

struct EmbeddingCheck {
  ResidualReport residuals;
  double objective = 0.0;  // sum of c_ij * d(i,j) on the embedding
  double tol = 0.0;
  bool ok = false;         // every residual within tol
};

// Re-evaluates all relaxation rows directly on the vectors (never throws;
// reporting is unconditional).
EmbeddingCheck verify_embedding(const Embedding& e, const Graph& g, int s_star,
                                double tol);

Eigen::MatrixXd gram_of(const Embedding& e);

}  // namespace sparsecut
