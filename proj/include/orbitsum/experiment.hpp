#ifndef ORBITSUM_EXPERIMENT_HPP
#define ORBITSUM_EXPERIMENT_HPP

#include <istream>
#include <string>
#include <vector>

#include "orbitsum/verify.hpp"

namespace orbitsum {

/// One experiment section of a config file. Flat key = value text under a
/// [section] header; unknown keys are rejected. The struct round-trips
/// losslessly through serialize/parse.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string kind = "single";  // multi-term|single|bilinear|varlimit|hyperbolic|smooth
  u64 count = 0;
  u64 seed = 1;
  u64 p_min = 10000;
  u64 p_max = 100000;
  double t_min_coeff = 0.0;
  double t_min_exp = 0.0;
  double eps = 0.5;
  double B = 2.0;
  std::string n_mode = "equal_p";  // equal_p | fixed | window_min
  u64 N = 0;
  u64 Q = 1;
  std::string h_policy = "random";  // random | fixed
  u64 h = 1;
  u64 K = 0, M = 0, H = 0, s = 0;
  unsigned threads = 1;
  std::string output = "report";  // path prefix for .csv / .jsonl
  std::string format = "both";    // csv | jsonl | both

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::vector<ExperimentConfig> parse_experiment_configs(std::istream& is);
std::vector<ExperimentConfig> parse_experiment_configs(const std::string& text);
std::vector<ExperimentConfig> load_experiment_configs(const std::string& path);
std::string serialize_experiment_configs(const std::vector<ExperimentConfig>& configs);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<BoundReport> reports;
};

/// Samples `count` instances (seed, seed+1, ...), derives N per n_mode,
/// checks the kind's hypotheses and evaluates sums. A sieve is built
/// internally when the kind needs one and none is supplied.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const FactorSieve* sieve = nullptr);

}  // namespace orbitsum

#endif  // ORBITSUM_EXPERIMENT_HPP
