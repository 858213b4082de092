#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sparsecut/metric.hpp"
#include "sparsecut/rounding.hpp"
#include "sparsecut/rng.hpp"

namespace sparsecut {

// Counter-based stream of m-dimensional standard Gaussian vectors. Vector
// number t is a pure function of (seed, t), so identical seeds replay the
// identical sequence and samples stay independent across split streams.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, int dim)
      : seed_(seed), dim_(dim), counter_(0) {}

  Eigen::VectorXd next() {
    SplitRng rng(mix64(seed_, counter_++));
    Eigen::VectorXd g(dim_);
    for (int c = 0; c < dim_; ++c) g(c) = rng.next_gaussian();
    return g;
  }

  std::uint64_t seed() const { return seed_; }
  int dim() const { return dim_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  int dim_;
  std::uint64_t counter_;
};

// max over j in S of <g, v_i - v_j>; the building block behind f_ik.
double max_inner_gap(const MetricView& m, int i, const std::vector<int>& set,
                     const Eigen::VectorXd& g);

// max over the k-hop delta-short neighborhood of node i (metric index) of
// <g, v_i - v_j>. Nonnegative since i belongs to its own neighborhood.
double f_ik(const MetricView& m, int i, int k, double delta,
            const Eigen::VectorXd& g);

struct MuEstimate {
  double mu_hat = 0.0;
  double std_err = 0.0;
  int samples = 0;
};

// Monte-Carlo mean of f_ik over T Gaussians; T >= 2.
MuEstimate estimate_mu(const MetricView& m, int i, int k, double delta, int t,
                       GaussianStream& stream);

struct Verdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string tolerance;  // human-readable slack the verdict used
};

struct HarnessReport {
  std::string experiment;
  std::string instance;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<std::string> sample_columns;
  std::vector<std::vector<double>> sample_rows;  // one row per sample
  std::map<std::string, double> aggregates;
  std::vector<Verdict> verdicts;
};

void write_csv(const HarnessReport& report, std::ostream& out);

// Per-sample sizes of the projection sides L = {<v_i,g> <= -1} and
// R = {<v_i,g> >= 1}; aggregates the frequency of min(|L|,|R|) >= c'n and
// the normalized product mean.
HarnessReport lr_experiment(const ScaledInstance& inst, int t, double c_prime,
                            GaussianStream& stream);

// Per-sample size of the greedy maximal matching over pairs that are both
// delta-short and separated by >= 2 along the sampled direction. The scan
// order is distance-major with a seed-keyed shuffle inside ties, so the
// per-sample size is monotone when delta grows.
HarnessReport matching_experiment(const ScaledInstance& inst, double delta,
                                  int t, GaussianStream& stream);

// Empirical deviation tails of f_ik against the Gaussian-Lipschitz bound
// 2 exp(-alpha^2 / (2 k delta)).
HarnessReport concentration_check(const MetricView& m, int i, int k,
                                  double delta, int t,
                                  const std::vector<double>& alphas,
                                  GaussianStream& stream);

struct MonotonicityVerdict {
  bool pass = false;
  double mu_low = 0.0;    // estimate for (i, k)
  double mu_high = 0.0;   // estimate for (i', k+1)
  double paired_se = 0.0;
  int samples = 0;
};

// Paired common-random-numbers test of mu_{i',k+1} >= mu_{i,k} for a
// delta-neighbor i' of i; passes when the paired mean difference is above
// -3 standard errors.
MonotonicityVerdict neighbor_monotonicity_check(const MetricView& m, int i,
                                                int i_prime, int k,
                                                double delta, int t,
                                                GaussianStream& stream);

// Synthetic point sets for the experiments.

// n/2 points at +e1 and n/2 at -e1 (one-dimensional); n even.
ScaledInstance antipodal_pair_instance(int n);

// {0,1}^d scaled by 1/sqrt(d/2), restricted to Hamming weights within
// sqrt(d) of d/2.
ScaledInstance hypercube_layers_instance(int d);

}  // namespace sparsecut
