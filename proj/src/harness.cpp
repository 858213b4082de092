#include "sparsecut/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sparsecut {

double max_inner_gap(const MetricView& m, int i, const std::vector<int>& set,
                     const Eigen::VectorXd& g) {
  if (g.size() != m.embedding().dim())
    throw std::invalid_argument("direction dimension mismatch");
  const auto& pts = m.embedding().points;
  double best = -std::numeric_limits<double>::infinity();
  for (int j : set)
    best = std::max(best, (pts.row(i) - pts.row(j)).dot(g));
  return best;
}

double f_ik(const MetricView& m, int i, int k, double delta,
            const Eigen::VectorXd& g) {
  return max_inner_gap(m, i, m.gamma_k(i, k, delta), g);
}

MuEstimate estimate_mu(const MetricView& m, int i, int k, double delta, int t,
                       GaussianStream& stream) {
  if (t < 2) throw std::invalid_argument("need at least two samples");
  const auto hood = m.gamma_k(i, k, delta);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < t; ++s) {
    const double f = max_inner_gap(m, i, hood, stream.next());
    sum += f;
    sum_sq += f * f;
  }
  MuEstimate est;
  est.samples = t;
  est.mu_hat = sum / t;
  const double var = std::max(0.0, sum_sq / t - est.mu_hat * est.mu_hat);
  est.std_err = std::sqrt(var / t);
  return est;
}

void write_csv(const HarnessReport& report, std::ostream& out) {
  out.precision(17);
  out << "sample";
  for (const auto& c : report.sample_columns) out << "," << c;
  out << "\n";
  for (std::size_t r = 0; r < report.sample_rows.size(); ++r) {
    out << r;
    for (double v : report.sample_rows[r]) out << "," << v;
    out << "\n";
  }
}

HarnessReport lr_experiment(const ScaledInstance& inst, int t, double c_prime,
                            GaussianStream& stream) {
  const int n = inst.node_count();
  HarnessReport rep;
  rep.experiment = "lr";
  rep.seed = stream.seed();
  rep.samples = t;
  rep.sample_columns = {"l_size", "r_size", "min_size"};
  rep.sample_rows.reserve(t);

  long hits = 0;
  double product_sum = 0.0;
  for (int s = 0; s < t; ++s) {
    const Eigen::VectorXd g = stream.next();
    const Eigen::VectorXd proj =
        inst.embedding.points.bottomRows(n) * g;
    int l = 0, r = 0;
    for (int i = 0; i < n; ++i) {
      if (proj(i) <= -1.0) ++l;
      else if (proj(i) >= 1.0) ++r;
    }
    const int mn = std::min(l, r);
    rep.sample_rows.push_back({double(l), double(r), double(mn)});
    if (mn >= c_prime * n) ++hits;
    product_sum += static_cast<double>(l) * r;
  }
  const double pr = static_cast<double>(hits) / t;
  rep.aggregates["c_prime"] = c_prime;
  rep.aggregates["pr_min_ge_cprime_n"] = pr;
  rep.aggregates["pr_std_err"] = std::sqrt(pr * (1.0 - pr) / t);
  rep.aggregates["mean_lr_product_over_n2"] =
      product_sum / (static_cast<double>(t) * n * n);
  return rep;
}

HarnessReport matching_experiment(const ScaledInstance& inst, double delta,
                                  int t, GaussianStream& stream) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const int n = inst.node_count();
  MetricView metric(inst.embedding);

  // Delta-short shortlist built once; the per-sample projection filter runs
  // over it only. Distance-major order keeps greedy sizes monotone in delta.
  struct Pair {
    double d;
    std::uint64_t key;
    int i, j;  // scaled node ids
    Eigen::VectorXd diff;
  };
  std::vector<Pair> shortlist;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = metric.dist(i + 1, j + 1);
      if (d <= delta) {
        Eigen::VectorXd diff = (inst.embedding.points.row(j + 1) -
                                inst.embedding.points.row(i + 1))
                                   .transpose();
        shortlist.push_back(
            {d,
             mix64(stream.seed(), (static_cast<std::uint64_t>(i) << 32) |
                                      static_cast<std::uint32_t>(j)),
             i, j, std::move(diff)});
      }
    }
  std::sort(shortlist.begin(), shortlist.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.key != b.key) return a.key < b.key;
    return std::pair{a.i, a.j} < std::pair{b.i, b.j};
  });

  HarnessReport rep;
  rep.experiment = "matching";
  rep.seed = stream.seed();
  rep.samples = t;
  rep.sample_columns = {"matching_size"};
  rep.sample_rows.reserve(t);

  std::vector<char> used(n, 0);
  double size_sum = 0.0, size_sq_sum = 0.0;
  for (int s = 0; s < t; ++s) {
    const Eigen::VectorXd g = stream.next();
    std::fill(used.begin(), used.end(), 0);
    int matched = 0;
    for (const auto& p : shortlist) {
      if (used[p.i] || used[p.j]) continue;
      if (std::abs(p.diff.dot(g)) < 2.0) continue;
      used[p.i] = 1;
      used[p.j] = 1;
      ++matched;
    }
    rep.sample_rows.push_back({double(matched)});
    size_sum += matched;
    size_sq_sum += static_cast<double>(matched) * matched;
  }
  const double mean = size_sum / t;
  const double var = std::max(0.0, size_sq_sum / t - mean * mean);
  rep.aggregates["delta"] = delta;
  rep.aggregates["shortlist_pairs"] = static_cast<double>(shortlist.size());
  rep.aggregates["mean_matching_over_n"] = mean / n;
  rep.aggregates["mean_std_err_over_n"] = std::sqrt(var / t) / n;
  return rep;
}

HarnessReport concentration_check(const MetricView& m, int i, int k,
                                  double delta, int t,
                                  const std::vector<double>& alphas,
                                  GaussianStream& stream) {
  for (double a : alphas)
    if (!(a >= 0.0)) throw std::invalid_argument("alphas must be >= 0");
  const auto hood = m.gamma_k(i, k, delta);

  HarnessReport rep;
  rep.experiment = "concentration";
  rep.seed = stream.seed();
  rep.samples = t;
  rep.sample_columns = {"f"};
  rep.sample_rows.reserve(t);

  std::vector<double> values(t);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < t; ++s) {
    values[s] = max_inner_gap(m, i, hood, stream.next());
    rep.sample_rows.push_back({values[s]});
    sum += values[s];
    sum_sq += values[s] * values[s];
  }
  const double mu_hat = sum / t;
  const double var = std::max(0.0, sum_sq / t - mu_hat * mu_hat);
  rep.aggregates["mu_hat"] = mu_hat;
  rep.aggregates["mu_std_err"] = std::sqrt(var / t);
  rep.aggregates["k_delta"] = k * delta;
  rep.aggregates["neighborhood_size"] = static_cast<double>(hood.size());

  const double l2 = k * delta;  // squared Lipschitz constant
  for (double alpha : alphas) {
    long exceed = 0;
    for (double v : values)
      if (std::abs(v - mu_hat) >= alpha) ++exceed;
    const double emp = static_cast<double>(exceed) / t;
    double bound;
    if (l2 > 0.0)
      bound = 2.0 * std::exp(-alpha * alpha / (2.0 * l2));
    else
      bound = alpha > 0.0 ? 0.0 : 2.0;
    const double se = std::sqrt(std::max(emp * (1.0 - emp), 1e-12) / t);
    Verdict v;
    v.name = "tail_alpha_" + std::to_string(alpha);
    v.observed = emp;
    v.bound = bound;
    v.tolerance = "3 binomial standard errors";
    v.pass = emp <= bound + 3.0 * se;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

MonotonicityVerdict neighbor_monotonicity_check(const MetricView& m, int i,
                                                int i_prime, int k,
                                                double delta, int t,
                                                GaussianStream& stream) {
  if (t < 2) throw std::invalid_argument("need at least two samples");
  if (m.dist(i, i_prime) > delta)
    throw std::invalid_argument("i_prime is not a delta-neighbor of i");
  const auto hood_low = m.gamma_k(i, k, delta);
  const auto hood_high = m.gamma_k(i_prime, k + 1, delta);

  double sum_low = 0.0, sum_high = 0.0, sum_diff = 0.0, sum_diff_sq = 0.0;
  for (int s = 0; s < t; ++s) {
    const Eigen::VectorXd g = stream.next();  // common randomness for the pair
    const double lo = max_inner_gap(m, i, hood_low, g);
    const double hi = max_inner_gap(m, i_prime, hood_high, g);
    sum_low += lo;
    sum_high += hi;
    const double d = hi - lo;
    sum_diff += d;
    sum_diff_sq += d * d;
  }
  MonotonicityVerdict v;
  v.samples = t;
  v.mu_low = sum_low / t;
  v.mu_high = sum_high / t;
  const double mean_diff = sum_diff / t;
  const double var = std::max(0.0, sum_diff_sq / t - mean_diff * mean_diff);
  v.paired_se = std::sqrt(var / t);
  v.pass = mean_diff >= -3.0 * v.paired_se;
  return v;
}

ScaledInstance antipodal_pair_instance(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("antipodal instance needs even n >= 2");
  ScaledInstance inst;
  inst.s_star = n / 2;
  inst.kept.resize(n);
  for (int i = 0; i < n; ++i) inst.kept[i] = i;
  inst.embedding.points = Eigen::MatrixXd::Zero(n + 1, 1);
  for (int i = 0; i < n; ++i)
    inst.embedding.points(i + 1, 0) = i < n / 2 ? 1.0 : -1.0;
  return inst;
}

ScaledInstance hypercube_layers_instance(int d) {
  if (d < 2 || d > 20) throw std::invalid_argument("need 2 <= d <= 20");
  const double lo = d / 2.0 - std::sqrt(static_cast<double>(d));
  const double hi = d / 2.0 + std::sqrt(static_cast<double>(d));
  std::vector<int> words;
  for (int x = 0; x < (1 << d); ++x) {
    const int w = __builtin_popcount(static_cast<unsigned>(x));
    if (w >= lo && w <= hi) words.push_back(x);
  }
  const int n = static_cast<int>(words.size());
  ScaledInstance inst;
  inst.s_star = std::max(1, n / 2);
  inst.kept.resize(n);
  for (int i = 0; i < n; ++i) inst.kept[i] = i;
  inst.embedding.points = Eigen::MatrixXd::Zero(n + 1, d);
  const double scale = 1.0 / std::sqrt(d / 2.0);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < d; ++b)
      inst.embedding.points(i + 1, b) = ((words[i] >> b) & 1) ? scale : 0.0;
  return inst;
}

}  // namespace sparsecut
