#include "sparsecut/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsecut {

void LinearFunctional::add_distance(int i, int j, double coeff) {
  terms.push_back({i, i, coeff});
  terms.push_back({j, j, coeff});
  terms.push_back({std::min(i, j), std::max(i, j), -2.0 * coeff});
}

int ConstraintSystem::count_equalities() const {
  int c = 0;
  for (const auto& k : constraints) c += k.sense == Sense::eq;
  return c;
}

int ConstraintSystem::count_inequalities() const {
  return static_cast<int>(constraints.size()) - count_equalities();
}

ConstraintSystem build_relaxation(const Graph& g, int s_star,
                                  bool relaxed_size_bounds) {
  const int n = g.n;
  if (s_star < 1 || s_star > n / 2)
    throw std::invalid_argument("s_star must lie in [1, n/2]");

  ConstraintSystem sys;
  sys.dim = n + 1;
  sys.s_star = s_star;
  sys.relaxed_size_bounds = relaxed_size_bounds;

  for (const auto& e : g.edges)
    if (e.cost != 0.0) sys.objective.add_distance(e.u + 1, e.v + 1, e.cost);

  LinearFunctional total_norm;
  for (int i = 1; i <= n; ++i) total_norm.terms.push_back({i, i, 1.0});
  LinearFunctional total_dist;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) total_dist.add_distance(i, j, 1.0);

  const double s = static_cast<double>(s_star);
  const double pairs = s * (n - s);
  if (!relaxed_size_bounds) {
    sys.constraints.push_back({total_norm, Sense::eq, s, "I"});
    sys.constraints.push_back({total_dist, Sense::eq, pairs, "II"});
  } else {
    // Covers every true size in [s_star, 2*s_star] with factor-2 slack.
    auto negated = [](const LinearFunctional& f) {
      LinearFunctional r = f;
      for (auto& t : r.terms) t.coeff = -t.coeff;
      return r;
    };
    sys.constraints.push_back({total_norm, Sense::le, 2.0 * s, "I.ub"});
    sys.constraints.push_back({negated(total_norm), Sense::le, -s, "I.lb"});
    sys.constraints.push_back({total_dist, Sense::le, 2.0 * pairs, "II.ub"});
    sys.constraints.push_back({negated(total_dist), Sense::le, -0.5 * pairs, "II.lb"});
  }
  for (int i = 1; i <= n; ++i) {
    LinearFunctional cap;
    cap.terms.push_back({i, i, 1.0});
    sys.constraints.push_back({cap, Sense::le, 1.0, "V[" + std::to_string(i - 1) + "]"});
  }
  LinearFunctional origin;
  origin.terms.push_back({0, 0, 1.0});
  sys.constraints.push_back({origin, Sense::eq, 0.0, "VI"});
  return sys;
}

std::vector<TriangleViolation> separate_triangles(const Eigen::MatrixXd& gram,
                                                  int budget, double tol) {
  std::vector<TriangleViolation> out;
  if (budget <= 0) return out;
  const int dim = static_cast<int>(gram.rows());
  auto dist = [&](int a, int b) {
    return gram(a, a) + gram(b, b) - 2.0 * gram(a, b);
  };
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double dij = dist(i, j);
      for (int k = 0; k < dim; ++k) {
        if (k == i || k == j) continue;
        const double v = dij - dist(i, k) - dist(k, j);
        if (v > tol) out.push_back({i, j, k, v});
      }
    }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    return std::array{a.i, a.j, a.k} < std::array{b.i, b.j, b.k};
  });
  if (static_cast<int>(out.size()) > budget) out.resize(budget);
  return out;
}

double ResidualReport::max_violation() const {
  return std::max({total_norm, total_dist, max_norm_cap, origin_norm,
                   max_triangle});
}

Eigen::MatrixXd gram_of(const Embedding& e) {
  return e.points * e.points.transpose();
}

Embedding gram_to_vectors(const SdpSolution& sol, double eps_factor,
                          double eps_psd) {
  (void)eps_factor;  // error budget is absorbed by the eigenvalue clamp
  const Eigen::MatrixXd& x = sol.gram;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
  if (eig.info() != Eigen::Success)
    throw SolverError("eigendecomposition failed");
  const Eigen::VectorXd& vals = eig.eigenvalues();  // ascending
  if (vals(0) < -eps_psd)
    throw std::invalid_argument("gram matrix not PSD within tolerance");

  const int dim = static_cast<int>(x.rows());
  std::vector<int> keep;
  for (int c = dim - 1; c >= 0; --c)
    if (vals(c) > eps_psd) keep.push_back(c);  // descending eigenvalue order
  if (keep.empty()) keep.push_back(dim - 1);   // zero matrix still gets a column

  Embedding e;
  e.points.resize(dim, static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    Eigen::VectorXd col = eig.eigenvectors().col(keep[c]);
    // Deterministic sign: largest-magnitude entry made positive.
    int arg = 0;
    for (int r = 1; r < dim; ++r)
      if (std::abs(col(r)) > std::abs(col(arg))) arg = r;
    if (col(arg) < 0.0) col = -col;
    e.points.col(static_cast<int>(c)) =
        col * std::sqrt(std::max(vals(keep[c]), 0.0));
  }
  e.points.row(0).setZero();  // origin is exact by construction
  return e;
}

Embedding embed_integral_cut(const Graph& g, const std::vector<int>& members) {
  if (members.empty() || static_cast<int>(members.size()) >= g.n)
    throw std::invalid_argument("cut side must be a proper nonempty subset");
  Embedding e;
  e.points = Eigen::MatrixXd::Zero(g.n + 1, 1);
  for (int u : members) {
    if (u < 0 || u >= g.n) throw std::invalid_argument("cut member out of range");
    e.points(u + 1, 0) = 1.0;
  }
  return e;
}

EmbeddingCheck verify_embedding(const Embedding& e, const Graph& g, int s_star,
                                double tol) {
  const int n = g.n;
  auto dist = [&](int a, int b) {
    return (e.points.row(a) - e.points.row(b)).squaredNorm();
  };

  EmbeddingCheck chk;
  chk.tol = tol;

  double norm_sum = 0.0;
  double cap = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double sq = e.points.row(i).squaredNorm();
    norm_sum += sq;
    cap = std::max(cap, sq - 1.0);
  }
  chk.residuals.total_norm = std::abs(norm_sum - s_star);
  chk.residuals.max_norm_cap = std::max(0.0, cap);
  chk.residuals.origin_norm = e.points.row(0).squaredNorm();

  double dist_sum = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) dist_sum += dist(i, j);
  chk.residuals.total_dist =
      std::abs(dist_sum - static_cast<double>(s_star) * (n - s_star));

  for (const auto& edge : g.edges)
    chk.objective += edge.cost * dist(edge.u + 1, edge.v + 1);

  double worst = 0.0;
  std::array<int, 3> triple{-1, -1, -1};
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double dij = dist(i, j);
      for (int k = 0; k <= n; ++k) {
        if (k == i || k == j) continue;
        const double v = dij - dist(i, k) - dist(k, j);
        if (v > worst) {
          worst = v;
          triple = {i, j, k};
        }
      }
    }
  chk.residuals.max_triangle = worst;
  chk.residuals.worst_triple = triple;
  chk.ok = chk.residuals.max_violation() <= tol;
  return chk;
}

}  // namespace sparsecut
