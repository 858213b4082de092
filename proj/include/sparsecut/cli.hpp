#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsecut/calibration.hpp"

namespace sparsecut {

struct RunConfig {
  std::string command;        // gen | exact | solve | round | pipeline | harness
  std::string harness_kind;   // lr | matching | mu | concentration
  std::string graph_path;
  std::string gen_spec;       // kind:n[:p[:q]]
  std::string embedding_path;
  std::string instance;       // pm_e1:N | hypercube:D | point:N
  std::string out_path;       // empty = stdout
  std::string csv_path;       // per-sample dump for harness commands
  std::string embedding_out;  // solve: also write the factored embedding
  std::uint64_t seed = 0;
  bool has_seed = false;
  int s_star = 0;
  int samples = 10000;
  int gaussian_retries = calibration::kGaussianRetries;
  int oracle_limit = 20;
  int node = 0;
  int k = 1;
  double delta_kappa = calibration::kDeltaKappa;
  double c_prime = calibration::kCPrime;
  double delta = 0.0;         // 0 means derive from delta_kappa
  double eps_feas = 1e-6;
  double eps_psd = 1e-8;
  int max_rounds = 50;
  std::vector<double> alphas{0.25, 0.5, 1.0};
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the argument parser already printed its message (help text or
// a parse diagnostic); carries the process exit code.
class CliExit : public std::exception {
 public:
  explicit CliExit(int code) : code_(code) {}
  int code() const { return code_; }
  const char* what() const noexcept override { return "cli exit"; }

 private:
  int code_;
};

RunConfig parse_config(const std::vector<std::string>& args);

// Dispatches the command and writes its report. Returns 0 on success, 2 on
// expected negative outcomes (every rounding path failed), throws on faults.
int run(const RunConfig& config);

}  // namespace sparsecut
