#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sparsecut/graph.hpp"
#include "sparsecut/sdp.hpp"
#include "test_util.hpp"

using namespace sparsecut;

namespace {

Graph c4() {
  return build_graph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
}

Graph two_triangles() {
  return build_graph(6, {{0, 1, 1},
                         {1, 2, 1},
                         {0, 2, 1},
                         {3, 4, 1},
                         {4, 5, 1},
                         {3, 5, 1},
                         {2, 3, 1}});
}

Eigen::MatrixXd antipodal_gram() {
  Eigen::MatrixXd g(3, 3);
  g << 0, 0, 0,
       0, 1, -1,
       0, -1, 1;
  return g;
}

}  // namespace

TEST_CASE("relaxation shape for n=3, s=1") {
  const Graph g = build_graph(3, {{0, 1, 1}, {1, 2, 1}});
  const ConstraintSystem sys = build_relaxation(g, 1);
  CHECK(sys.dim == 4);
  CHECK(sys.s_star == 1);
  CHECK(sys.count_equalities() == 3);    // norm sum, pair sum, origin pin
  CHECK(sys.count_inequalities() == 3);  // one norm cap per node
  for (const auto& k : sys.constraints) CHECK(k.label.rfind("tri", 0) != 0);
}

TEST_CASE("the full triangle family over four points has 12 members") {
  // tol = -inf turns the separation scan into plain enumeration
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(4, 4);
  gram(0, 0) = 0.0;
  const auto all = separate_triangles(gram, 1 << 20,
                                      -std::numeric_limits<double>::infinity());
  CHECK(all.size() == 12);
}

TEST_CASE("s_star bounds") {
  const Graph g = c4();
  CHECK_THROWS_AS(build_relaxation(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_relaxation(g, 3), std::invalid_argument);
}

TEST_CASE("integral cut vectors have no triangle violation") {
  const Graph g = c4();
  const Embedding e = embed_integral_cut(g, {0, 1});
  const auto viols = separate_triangles(gram_of(e), 100, 1e-12);
  CHECK(viols.empty());
}

TEST_CASE("antipodal points violate the origin triangle by 2") {
  const auto viols = separate_triangles(antipodal_gram(), 10, 1e-9);
  REQUIRE(viols.size() == 1);
  CHECK(viols[0].violation == doctest::Approx(2.0));
  CHECK(viols[0].i == 1);
  CHECK(viols[0].j == 2);
  CHECK(viols[0].k == 0);
}

TEST_CASE("budget zero returns nothing") {
  CHECK(separate_triangles(antipodal_gram(), 0, 1e-9).empty());
}

TEST_CASE("single edge solves to the edge cost") {
  const Graph g = build_graph(2, {{0, 1, 1.7}});
  const SdpSolution sol = solve_sdp(build_relaxation(g, 1));
  CHECK(sol.objective_value == doctest::Approx(1.7).epsilon(1e-3));
  CHECK(sol.residuals.max_violation() <= 1e-6);
  CHECK(sol.max_eig_neg <= 1e-8);
}

TEST_CASE("solution satisfies the advertised contract") {
  const Graph g = two_triangles();
  for (int s : {1, 2, 3}) {
    const SdpSolution sol = solve_sdp(build_relaxation(g, s));
    CHECK(sol.residuals.max_violation() <= 1e-6);
    CHECK(sol.max_eig_neg <= 1e-8);
    // fresh separation at 10x the feasibility tolerance certifies closure
    CHECK(separate_triangles(sol.gram, 1000, 1e-5).empty());
    CHECK((sol.gram - sol.gram.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("relaxation never exceeds the best integral cut of the same size") {
  std::vector<Graph> corpus = {
      c4(), two_triangles(), generate(GraphKind::complete, 5, 0),
      generate(GraphKind::gnp, 7, 11, {0.6, 0.0}),
      generate(GraphKind::planted_bisection, 8, 3, {0.9, 0.15})};
  for (const auto& g : corpus) {
    for (int s = 1; s <= g.n / 2; ++s) {
      const SdpSolution sol = solve_sdp(build_relaxation(g, s));
      const double integral = testutil::min_cut_cost_of_size(g, s);
      CHECK(sol.objective_value <= integral + 1e-4);
    }
  }
}

TEST_CASE("contradictory equalities are reported infeasible") {
  const Graph g = c4();
  ConstraintSystem sys = build_relaxation(g, 2);
  Constraint clash;
  for (int i = 1; i <= g.n; ++i) clash.f.terms.push_back({i, i, 1.0});
  clash.sense = Sense::eq;
  clash.rhs = 3.0;  // fights the rhs=2 norm-sum row
  clash.label = "norm-sum-clash";
  sys.constraints.push_back(clash);
  CHECK_THROWS_AS(solve_sdp(sys), InfeasibleError);
  try {
    solve_sdp(sys);
  } catch (const InfeasibleError& e) {
    CHECK(!e.violated.empty());
  }
}

TEST_CASE("factorization round trip") {
  const Graph g = two_triangles();
  const SdpSolution sol = solve_sdp(build_relaxation(g, 3));
  const Embedding e = gram_to_vectors(sol);
  CHECK((gram_of(e) - sol.gram).lpNorm<Eigen::Infinity>() <= 1e-8 + 1e-8);
  CHECK(e.points.row(0).norm() == 0.0);
  CHECK(e.dim() <= g.n + 1);
}

TEST_CASE("identity gram factors to orthonormal points") {
  SdpSolution sol;
  sol.gram = Eigen::MatrixXd::Identity(5, 5);
  sol.gram(0, 0) = 0.0;
  const Embedding e = gram_to_vectors(sol);
  CHECK(e.dim() == 4);
  CHECK((gram_of(e) - sol.gram).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("rank-1 integral gram factors to a 0/1 line") {
  const Graph g = c4();
  SdpSolution sol;
  sol.gram = gram_of(embed_integral_cut(g, {1, 3}));
  const Embedding e = gram_to_vectors(sol);
  REQUIRE(e.dim() == 1);
  for (int r = 0; r < e.count(); ++r) {
    const double v = e.points(r, 0);
    CHECK((std::abs(v) <= 1e-9 || std::abs(v - 1.0) <= 1e-9));
  }
}

TEST_CASE("too-negative eigenvalues are refused") {
  SdpSolution sol;
  sol.gram = Eigen::MatrixXd::Identity(3, 3);
  sol.gram(2, 2) = -1e-7;  // -10x the default PSD tolerance
  CHECK_THROWS_AS(gram_to_vectors(sol), std::invalid_argument);
}

TEST_CASE("integral embedding verifies exactly") {
  const Graph g = c4();
  const Embedding e = embed_integral_cut(g, {0, 1});
  const EmbeddingCheck chk = verify_embedding(e, g, 2, 1e-12);
  CHECK(chk.ok);
  CHECK(chk.residuals.total_norm == 0.0);
  CHECK(chk.residuals.total_dist == 0.0);
  CHECK(chk.residuals.max_norm_cap == 0.0);
  CHECK(chk.residuals.origin_norm == 0.0);
  CHECK(chk.residuals.max_triangle <= 0.0);
  CHECK(chk.objective == 2.0);  // the cut cost
}

TEST_CASE("perturbation shows up in the norm-sum residual") {
  const Graph g = c4();
  Embedding e = embed_integral_cut(g, {0, 1});
  e.points(1, 0) += 1e-3;
  const EmbeddingCheck chk = verify_embedding(e, g, 2, 1e-12);
  CHECK(chk.residuals.total_norm > 1e-4);
  CHECK_FALSE(chk.ok);
}

TEST_CASE("verification never throws, even with infinite tolerance") {
  const Graph g = c4();
  const Embedding e = embed_integral_cut(g, {0});
  const EmbeddingCheck chk =
      verify_embedding(e, g, 1, std::numeric_limits<double>::infinity());
  CHECK(chk.ok);
}
