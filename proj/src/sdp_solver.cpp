#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "sparsecut/sdp.hpp"

namespace sparsecut {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Packed symmetric coordinates: diagonal entries first-class, off-diagonals
// scaled by sqrt(2) so Euclidean inner products match Frobenius products.
struct SymPack {
  int n = 0;
  int size = 0;
  std::vector<int> base;  // base[i] = index of (i,i)

  explicit SymPack(int n_) : n(n_) {
    base.resize(n);
    int at = 0;
    for (int i = 0; i < n; ++i) {
      base[i] = at;
      at += n - i;
    }
    size = at;
  }

  int idx(int i, int j) const {  // requires i <= j
    return base[i] + (j - i);
  }

  void unpack(const Eigen::VectorXd& v, Eigen::MatrixXd& m) const {
    m.resize(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = v(idx(i, i));
      for (int j = i + 1; j < n; ++j) {
        const double w = v(idx(i, j)) / kSqrt2;
        m(i, j) = w;
        m(j, i) = w;
      }
    }
  }

  void pack(const Eigen::MatrixXd& m, Eigen::VectorXd& v) const {
    v.resize(size);
    for (int i = 0; i < n; ++i) {
      v(idx(i, i)) = m(i, i);
      for (int j = i + 1; j < n; ++j) v(idx(i, j)) = m(i, j) * kSqrt2;
    }
  }
};

struct Row {
  std::vector<std::pair<int, double>> entries;  // packed index -> coeff, unit 2-norm
  double rhs = 0.0;      // normalized
  double anorm = 1.0;    // original Frobenius norm of the row
  bool eq = false;
  bool triangle = false;
  std::array<int, 3> triple{-1, -1, -1};
  std::string label;
};

// Rewrites a functional over the (n+1)-dim Gram as a packed row over the
// n x n node block; origin entries vanish because that row is pinned.
std::optional<Row> reduce_functional(const LinearFunctional& f, const SymPack& pk) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : f.terms) {
    if (t.i == 0 || t.j == 0) continue;
    const int a = std::min(t.i, t.j) - 1;
    const int b = std::max(t.i, t.j) - 1;
    acc[{a, b}] += t.coeff;
  }
  Row row;
  double norm_sq = 0.0;
  for (const auto& [key, coeff] : acc) {
    if (coeff == 0.0) continue;
    const double packed = key.first == key.second ? coeff : coeff / kSqrt2;
    row.entries.push_back({pk.idx(key.first, key.second), packed});
    norm_sq += packed * packed;
  }
  if (row.entries.empty()) return std::nullopt;
  row.anorm = std::sqrt(norm_sq);
  for (auto& [i, c] : row.entries) c /= row.anorm;
  return row;
}

double row_dot(const Row& row, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (const auto& [i, c] : row.entries) s += c * v(i);
  return s;
}

class AdmmSolver {
 public:
  AdmmSolver(const ConstraintSystem& sys, const SolveOptions& opts)
      : sys_(sys), opts_(opts), n_(sys.dim - 1), pack_(n_) {
    build_objective();
    for (const auto& k : sys.constraints) add_constraint(k);
    check_affine_consistency();

    // Start on the scaled identity: meets the norm-sum row exactly and is
    // safely interior to the PSD cone.
    Eigen::MatrixXd x0 = Eigen::MatrixXd::Identity(n_, n_) *
                         (static_cast<double>(sys.s_star) / n_);
    pack_.pack(x0, x_);
    z_ = x_;
    u_ = Eigen::VectorXd::Zero(pack_.size);
    rho_ = 1.0 / n_;
  }

  SdpSolution run() {
    SdpSolution sol;
    sol.s_star = sys_.s_star;
    int rounds = 0;
    const int budget = opts_.budget > 0 ? opts_.budget : 5 * n_;
    // Cheap target while cuts are still arriving; the strict tolerance is
    // only paid once separation has closed.
    const double loose = std::max(100.0 * opts_.eps_feas, 1e-4);
    refactor();
    while (true) {
      iterate_until_converged(sol, loose, 10.0 * opts_.eps_gap);
      auto viols = fresh_violations(budget);
      if (viols.empty()) {
        iterate_until_converged(sol, opts_.eps_feas, opts_.eps_gap);
        viols = fresh_violations(budget);
        if (viols.empty()) {
          finalize(sol, lifted_gram());
          sol.triangle_rounds = rounds;
          return sol;
        }
      }
      if (rounds >= opts_.max_rounds)
        throw SolverError("triangle separation did not close after " +
                          std::to_string(rounds) + " rounds");
      drop_slack_triangles();
      for (const auto& v : viols) add_triangle(v);
      refactor();
      ++rounds;
    }
  }

 private:
  void build_objective() {
    c_raw_ = Eigen::VectorXd::Zero(pack_.size);
    std::map<std::pair<int, int>, double> acc;
    for (const auto& t : sys_.objective.terms) {
      if (t.i == 0 || t.j == 0) continue;
      const int a = std::min(t.i, t.j) - 1;
      const int b = std::max(t.i, t.j) - 1;
      acc[{a, b}] += t.coeff;
    }
    for (const auto& [key, coeff] : acc) {
      const double packed = key.first == key.second ? coeff : coeff / kSqrt2;
      c_raw_(pack_.idx(key.first, key.second)) = packed;
    }
  }

  void add_constraint(const Constraint& k) {
    auto row = reduce_functional(k.f, pack_);
    if (!row) {
      // Functional vanished on the reduced block (origin pin does this);
      // a nonzero right-hand side would make the system unsatisfiable.
      const bool bad = k.sense == Sense::eq ? std::abs(k.rhs) > 1e-12
                                            : k.rhs < -1e-12;
      if (bad) throw InfeasibleError("constant constraint violated", {k.label});
      return;
    }
    row->rhs = k.rhs / row->anorm;
    row->eq = k.sense == Sense::eq;
    row->label = k.label;
    rows_.push_back(std::move(*row));
  }

  void add_triangle(const TriangleViolation& v) {
    LinearFunctional f;
    f.add_distance(v.i, v.j, 1.0);
    f.add_distance(v.i, v.k, -1.0);
    f.add_distance(v.k, v.j, -1.0);
    auto row = reduce_functional(f, pack_);
    if (!row) return;
    row->rhs = 0.0;
    row->eq = false;
    row->triangle = true;
    row->triple = {v.i, v.j, v.k};
    std::ostringstream label;
    label << "tri(" << v.i << "," << v.j << "," << v.k << ")";
    row->label = label.str();
    rows_.push_back(std::move(*row));
    present_.insert({v.i, v.j, v.k});
  }

  // Constraint hygiene for large runs only; a row that came back after being
  // dropped once is pinned forever, so the add/drop cycle cannot oscillate.
  void drop_slack_triangles() {
    if (rows_.size() <= 600) return;
    if (t_.size() != static_cast<Eigen::Index>(rows_.size())) return;
    std::vector<Row> kept;
    Eigen::VectorXd tk(t_.size());
    int at = 0;
    for (std::size_t l = 0; l < rows_.size(); ++l) {
      const Row& row = rows_[l];
      bool drop = false;
      if (row.triangle && !dropped_once_.count(row.triple)) {
        const double slack = row.rhs - row_dot(row, z_);
        const double dual = std::abs(t_(static_cast<Eigen::Index>(l))) * rho_;
        drop = slack * row.anorm > 1e-3 && dual < 1e-9;
      }
      if (drop) {
        present_.erase(row.triple);
        dropped_once_.insert(row.triple);
        continue;
      }
      tk(at) = t_(static_cast<Eigen::Index>(l));
      kept.push_back(row);
      ++at;
    }
    if (kept.size() == rows_.size()) return;
    rows_ = std::move(kept);
    t_ = tk.head(at).eval();
  }

  void refactor() {
    const int m = static_cast<int>(rows_.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (int l = 0; l < m; ++l)
      for (const auto& [i, c] : rows_[l].entries) trips.emplace_back(l, i, c);
    bmat_.resize(m, pack_.size);
    bmat_.setFromTriplets(trips.begin(), trips.end());
    bmat_.makeCompressed();
    Eigen::MatrixXd g = Eigen::MatrixXd(bmat_ * bmat_.transpose());
    g.diagonal().array() += 1.0;
    llt_.compute(g);
    if (llt_.info() != Eigen::Success)
      throw SolverError("normal matrix factorization failed");

    b_.resize(m);
    eq_.assign(m, 0);
    for (int l = 0; l < m; ++l) {
      b_(l) = rows_[l].rhs;
      eq_[l] = rows_[l].eq;
    }
    Eigen::VectorXd t_old = t_;
    t_ = Eigen::VectorXd::Zero(m);
    if (t_old.size() > 0 && t_old.size() <= m) t_.head(t_old.size()) = t_old;
    s_ = Eigen::VectorXd::Zero(m);
    for (int l = 0; l < m; ++l)
      if (!eq_[l]) s_(l) = std::max(0.0, b_(l) - row_dot(rows_[l], x_));
  }

  // Least-squares probe of the equality rows; a nonzero optimal residual is
  // a certificate that no Gram matrix can satisfy them simultaneously.
  void check_affine_consistency() const {
    std::vector<int> eq_rows;
    for (std::size_t l = 0; l < rows_.size(); ++l)
      if (rows_[l].eq) eq_rows.push_back(static_cast<int>(l));
    const int m = static_cast<int>(eq_rows.size());
    if (m == 0) return;
    Eigen::MatrixXd g(m, m);
    Eigen::VectorXd rhs(m);
    for (int a = 0; a < m; ++a) {
      rhs(a) = rows_[eq_rows[a]].rhs;
      for (int c = a; c < m; ++c) {
        double dot = 0.0;
        // Rows are short; quadratic scan over entries is fine here.
        for (const auto& [ia, va] : rows_[eq_rows[a]].entries)
          for (const auto& [ic, vc] : rows_[eq_rows[c]].entries)
            if (ia == ic) dot += va * vc;
        g(a, c) = dot;
        g(c, a) = dot;
      }
    }
    Eigen::MatrixXd g_reg = g;
    g_reg.diagonal().array() += 1e-12;
    Eigen::VectorXd lam = g_reg.ldlt().solve(rhs);
    // residual against the unregularized normal matrix, in original units;
    // the ridge solve alone would hide the inconsistency
    double worst = 0.0;
    int worst_row = -1;
    Eigen::VectorXd glam = g * lam;
    for (int a = 0; a < m; ++a) {
      const double r = std::abs(glam(a) - rhs(a)) * rows_[eq_rows[a]].anorm;
      if (r > worst) {
        worst = r;
        worst_row = a;
      }
    }
    if (worst > 1e-7) {
      std::vector<std::string> cert;
      for (int a = 0; a < m; ++a)
        if (std::abs(glam(a) - rhs(a)) * rows_[eq_rows[a]].anorm > 1e-9)
          cert.push_back(rows_[eq_rows[a]].label);
      std::ostringstream msg;
      msg << "equality rows are inconsistent (residual " << worst << " at "
          << rows_[eq_rows[worst_row]].label << ")";
      throw InfeasibleError(msg.str(), cert);
    }
  }

  // Weak-duality certificate: for multipliers y (inequality rows clamped to
  // >= 0), every feasible X has <C,X> >= trace_bound * lambda_min(C + B'y)
  // - y'b because the trace of X is pinned by the norm-sum row. Valid at any
  // iterate, so it doubles as an optimality stopping rule.
  double dual_bound() {
    Eigen::VectorXd y = rho_ * t_;
    for (int l = 0; l < static_cast<int>(rows_.size()); ++l)
      if (!eq_[l]) y(l) = std::max(0.0, y(l));
    Eigen::VectorXd mvec = c_raw_ + bmat_.transpose() * y;
    pack_.unpack(mvec, work_);
    eig_.compute(work_, Eigen::EigenvaluesOnly);
    const double lmin = eig_.eigenvalues().minCoeff();
    const double s = static_cast<double>(sys_.s_star);
    const double trace = lmin < 0.0 && sys_.relaxed_size_bounds ? 2.0 * s : s;
    return trace * lmin - y.dot(b_);
  }

  // One over-relaxed splitting step.
  void admm_step() {
    const int m = static_cast<int>(rows_.size());
    const double alpha = 1.6;

    Eigen::VectorXd r = z_ - u_ - c_raw_ / rho_;
    Eigen::VectorXd d = b_ - s_ - t_;
    Eigen::VectorXd p = bmat_ * r + bmat_ * (bmat_.transpose() * d);
    Eigen::VectorXd lam = llt_.solve(p);
    x_ = r + bmat_.transpose() * (d - lam);

    // relaxed copies of the coupling terms
    Eigen::VectorXd xh = alpha * x_ + (1.0 - alpha) * z_;
    Eigen::VectorXd w = bmat_ * x_;
    Eigen::VectorXd wh = alpha * w + (1.0 - alpha) * (b_ - s_);

    pack_.unpack(xh + u_, work_);
    eig_.compute(work_);
    Eigen::VectorXd vals = eig_.eigenvalues().cwiseMax(0.0);
    work_ = eig_.eigenvectors() * vals.asDiagonal() *
            eig_.eigenvectors().transpose();
    pack_.pack(work_, z_);

    for (int l = 0; l < m; ++l)
      s_(l) = eq_[l] ? 0.0 : std::max(0.0, b_(l) - wh(l) - t_(l));

    u_ += xh - z_;
    t_ += wh + s_ - b_;
  }

  void scale_rho(double factor) {
    rho_ *= factor;
    u_ /= factor;
    t_ /= factor;
  }

  // Splitting iteration with penalty continuation. Degenerate optima here
  // carry enormous dual multipliers (a tiny feasibility violation can buy a
  // large objective drop), so feasibility stalls are answered by escalating
  // the penalty while the accumulated duals are kept. Termination: a
  // feasible iterate passing the duality-gap certificate, or feasible
  // iterates whose objective re-descent (at relaxed penalty) stops
  // improving. The best feasible iterate seen is what the caller gets.
  void iterate_until_converged(SdpSolution& sol, double eps_target,
                               double gap_target) {
    const int check_every = 50;
    const double rho_floor = 1.0 / n_;
    const double improve_tol = std::max(0.25 * gap_target, 1e-7);
    double stall_viol = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    double prev_cycle_obj = std::numeric_limits<double>::infinity();
    int flat_cycles = 0;
    Eigen::VectorXd z_best;
    z_stall_ = z_;

    for (long it = 1; it <= opts_.max_iters; ++it) {
      admm_step();
      ++sol.iterations;
      if (it % check_every != 0) continue;
      const double viol = max_violation_on(z_);
      const double gap = (x_ - z_).lpNorm<Eigen::Infinity>();

      if (viol <= 0.9 * eps_target && gap <= 0.5 * eps_target) {
        const double obj = c_raw_.dot(z_);
        if (obj < best_obj) {
          best_obj = obj;
          z_best = z_;
        }
        if (obj - dual_bound() <= gap_target) return;
        flat_cycles = best_obj >= prev_cycle_obj - improve_tol
                          ? flat_cycles + 1
                          : 0;
        if (flat_cycles >= 2) {
          z_ = z_best;
          return;
        }
        prev_cycle_obj = best_obj;
        // feasible but uncertified: relax the penalty and descend again
        scale_rho(std::max(rho_floor / rho_, 1.0 / 64.0));
        stall_viol = std::numeric_limits<double>::infinity();
        continue;
      }

      if (it % (10 * check_every) == 0) {
        if (viol > 50.0 * eps_target) {
          // classic residual balancing far from feasibility
          const double dua =
              rho_ * (z_ - z_stall_).lpNorm<Eigen::Infinity>() / check_every;
          const double pri = std::max(gap, viol);
          if (pri > 10.0 * dua && rho_ < 1e4) scale_rho(2.0);
          else if (dua > 10.0 * pri && rho_ > 1e-4) scale_rho(0.5);
        } else if (viol > 0.5 * stall_viol && rho_ < 3e6) {
          // endgame: violation no longer halving, raise the penalty
          scale_rho(4.0);
        }
        stall_viol = viol;
        z_stall_ = z_;
      }
    }
    throw SolverError("iteration budget exhausted before reaching tolerance");
  }

  std::vector<TriangleViolation> fresh_violations(int budget) {
    auto viols = separate_triangles(lifted_gram(), budget, opts_.eps_feas);
    std::erase_if(viols, [&](const TriangleViolation& v) {
      return present_.count({v.i, v.j, v.k}) != 0;
    });
    return viols;
  }

  double max_violation_on(const Eigen::VectorXd& v) const {
    double worst = 0.0;
    for (const auto& row : rows_) {
      const double val = row_dot(row, v) - row.rhs;
      const double raw = (row.eq ? std::abs(val) : std::max(0.0, val)) * row.anorm;
      worst = std::max(worst, raw);
    }
    return worst;
  }

  Eigen::MatrixXd lifted_gram() const {
    Eigen::MatrixXd inner;
    pack_.unpack(z_, inner);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n_ + 1, n_ + 1);
    full.block(1, 1, n_, n_) = inner;
    return full;
  }

  void finalize(SdpSolution& sol, const Eigen::MatrixXd& gram) {
    sol.gram = gram;
    sol.objective_value = c_raw_.dot(z_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    sol.max_eig_neg = std::max(0.0, -eig.eigenvalues().minCoeff());

    ResidualReport& rr = sol.residuals;
    for (const auto& row : rows_) {
      const double val = row_dot(row, z_) - row.rhs;
      const double raw = (row.eq ? std::abs(val) : std::max(0.0, val)) * row.anorm;
      if (row.triangle) {
        if (raw > rr.max_triangle) {
          rr.max_triangle = raw;
          rr.worst_triple = row.triple;
        }
      } else if (row.label == "II" || row.label.rfind("II.", 0) == 0) {
        rr.total_dist = std::max(rr.total_dist, raw);
      } else if (row.label == "I" || row.label.rfind("I.", 0) == 0) {
        rr.total_norm = std::max(rr.total_norm, raw);
      } else if (row.label.rfind("V[", 0) == 0) {
        rr.max_norm_cap = std::max(rr.max_norm_cap, raw);
      }
    }
    rr.origin_norm = 0.0;  // structurally eliminated
    sol.active_triangles = static_cast<int>(present_.size());
    auto worst = separate_triangles(gram, 1, 0.0);
    sol.worst_triangle_exhaustive = worst.empty() ? 0.0 : worst[0].violation;
  }

  const ConstraintSystem& sys_;
  SolveOptions opts_;
  int n_;
  SymPack pack_;
  std::vector<Row> rows_;
  std::set<std::array<int, 3>> present_;
  std::set<std::array<int, 3>> dropped_once_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> bmat_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd c_raw_, b_, x_, z_, u_, t_, s_;
  std::vector<char> eq_;
  double rho_ = 1.0;
  Eigen::MatrixXd work_;
  Eigen::VectorXd z_stall_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

}  // namespace

SdpSolution solve_sdp(const ConstraintSystem& sys, const SolveOptions& opts) {
  if (sys.dim < 3) throw std::invalid_argument("constraint system too small");
  AdmmSolver solver(sys, opts);
  return solver.run();
}

}  // namespace sparsecut
