#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spectemp/diffusion.hpp"
#include "spectemp/graph.hpp"
#include "spectemp/recovery.hpp"

namespace spectemp {

// Settings shared by the experiment drivers. Defaults are the desk-scale
// grid; every field can be overridden from a JSON file or the command line.
struct ExperimentConfig {
  std::vector<int> n_values{10, 20, 30};
  std::vector<double> p_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int trials = 50;
  std::vector<double> filter{1.0, 0.5};
  std::vector<int> sample_sizes{100, 1000, 10000};
  int repetitions = 50;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // 0: hardware concurrency
  RecoveryConfig recovery;

  // Throws ParameterError.
  void validate() const;
};

// Graphs that fail to come out connected within this many draws leave their
// trial unfilled and mark the cell degenerate.
inline constexpr int kMaxResample = 1000;

// Runs fn(0..count-1) on up to `threads` workers. Each index is handled
// exactly once and fn must only write to slots owned by its index, so the
// outcome does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// One random instance of a phase-diagram cell.
struct TrialOutcome {
  bool sampled = false;    // a connected graph was found
  int q = 0;
  bool unique = false;
  bool recovered = false;  // binarized recovery equals the truth
  bool failed = false;     // recovery threw
  std::string error;
};

// Connected ER graph for (n, p, seed), its shift templates, Q and the
// recovery verdict.
TrialOutcome run_trial(int n, double p, std::uint64_t seed, const RecoveryConfig& cfg);

struct PhaseCell {
  int n = 0;
  double p = 0.0;
  int trials = 0;     // trials with a connected sample
  double unique_fraction = 0.0;
  double recovery_fraction = 0.0;
  double mean_rank = 0.0;  // mean of N - Q
  bool degenerate = false; // some trial hit the resampling cap
  int failures = 0;        // recoveries that threw
};

// Throws ContractViolation if a unique instance is not recovered.
PhaseCell run_phase_cell(int n, double p, int trials, std::uint64_t seed, const RecoveryConfig& cfg,
                         int threads = 1);

// Cells in row-major (n, then p) order. Cell k uses stream k of cfg.seed.
std::vector<PhaseCell> run_phase(const ExperimentConfig& cfg);

struct RankBucket {
  int rank = 0;
  int count = 0;
  int unique = 0;
  int recovered = 0;
};

struct RankHistogram {
  int n = 0;
  double p = 0.0;
  int trials = 0;
  int unsampled = 0;
  int failures = 0;
  std::vector<RankBucket> buckets;  // rank 0..n, rank = N - Q
};

RankHistogram run_rankhist(int n, double p, int trials, std::uint64_t seed, const RecoveryConfig& cfg,
                           int threads = 1);

struct NoisyPoint {
  int m = 0;
  int repetitions = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double mean_epsilon = 0.0;
  int failures = 0;  // counted with error 1
};

struct NoisyCurve {
  int q = 0;
  // Error with the exact covariance H H^T in place of the sample estimate.
  double surrogate_error = 0.0;
  std::vector<NoisyPoint> points;
};

// Repetition r draws its signals from stream r of `seed` at every M.
NoisyCurve run_noisy(const Graph& g, const FilterSpec& h, const std::vector<int>& sample_sizes, int repetitions,
                     std::uint64_t seed, const RecoveryConfig& cfg, int threads = 1);

}  // namespace spectemp
