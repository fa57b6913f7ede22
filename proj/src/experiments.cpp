#include "spectemp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "spectemp/errors.hpp"
#include "spectemp/rng.hpp"
#include "spectemp/spectral.hpp"

namespace spectemp {

void ExperimentConfig::validate() const {
  if (n_values.empty() || p_values.empty()) throw ParameterError("the (n, p) grid is empty");
  for (int n : n_values)
    if (n < 2) throw ParameterError("grid sizes must be >= 2");
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("grid probabilities must lie in [0, 1]");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
  for (int m : sample_sizes)
    if (m < 1) throw ParameterError("sample sizes must be positive");
  if (threads < 0) throw ParameterError("threads must be >= 0");
  FilterSpec(Eigen::Map<const Eigen::VectorXd>(filter.data(), static_cast<Eigen::Index>(filter.size())));
  recovery.validate();
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

TrialOutcome run_trial(int n, double p, std::uint64_t seed, const RecoveryConfig& cfg) {
  TrialOutcome out;
  const std::optional<Graph> g = connected_erdos_renyi(n, p, seed, kMaxResample);
  if (!g) return out;
  out.sampled = true;
  const ShiftMatrix s = build_shift(*g, cfg.mode);
  const SpectralTemplates t = templates_from_shift(s);
  const Eigen::VectorXd d = degrees(*g);
  const Uniqueness u = check_uniqueness(t, cfg.mode, d, cfg.rank_tol);
  out.q = u.q;
  out.unique = u.unique;
  try {
    const RecoveryResult r = recover(t, cfg, d);
    out.recovered = r.binarized == g->adjacency();
  } catch (const Error& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

PhaseCell run_phase_cell(int n, double p, int trials, std::uint64_t seed, const RecoveryConfig& cfg, int threads) {
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    outcomes[static_cast<std::size_t>(t)] = run_trial(n, p, stream_seed(seed, static_cast<std::uint64_t>(t)), cfg);
  });

  PhaseCell cell;
  cell.n = n;
  cell.p = p;
  int unique = 0, recovered = 0;
  double rank_sum = 0.0;
  for (const auto& o : outcomes) {
    if (!o.sampled) {
      cell.degenerate = true;
      continue;
    }
    ++cell.trials;
    unique += o.unique;
    recovered += o.recovered;
    cell.failures += o.failed;
    rank_sum += n - o.q;
    if (o.unique && !o.recovered)
      throw ContractViolation("unique instance not recovered (n=" + std::to_string(n) + ", p=" + std::to_string(p) +
                              (o.failed ? "): " + o.error : ")"));
  }
  if (cell.trials > 0) {
    cell.unique_fraction = static_cast<double>(unique) / cell.trials;
    cell.recovery_fraction = static_cast<double>(recovered) / cell.trials;
    cell.mean_rank = rank_sum / cell.trials;
  }
  return cell;
}

std::vector<PhaseCell> run_phase(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<PhaseCell> cells;
  std::uint64_t k = 0;
  for (int n : cfg.n_values)
    for (double p : cfg.p_values)
      cells.push_back(run_phase_cell(n, p, cfg.trials, stream_seed(cfg.seed, k++), cfg.recovery, cfg.threads));
  return cells;
}

RankHistogram run_rankhist(int n, double p, int trials, std::uint64_t seed, const RecoveryConfig& cfg, int threads) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    outcomes[static_cast<std::size_t>(t)] = run_trial(n, p, stream_seed(seed, static_cast<std::uint64_t>(t)), cfg);
  });

  RankHistogram hist;
  hist.n = n;
  hist.p = p;
  hist.buckets.resize(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r <= n; ++r) hist.buckets[static_cast<std::size_t>(r)].rank = r;
  for (const auto& o : outcomes) {
    if (!o.sampled) {
      ++hist.unsampled;
      continue;
    }
    ++hist.trials;
    hist.failures += o.failed;
    RankBucket& b = hist.buckets[static_cast<std::size_t>(n - o.q)];
    ++b.count;
    b.unique += o.unique;
    b.recovered += o.recovered;
  }
  return hist;
}

NoisyCurve run_noisy(const Graph& g, const FilterSpec& h, const std::vector<int>& sample_sizes, int repetitions,
                     std::uint64_t seed, const RecoveryConfig& cfg, int threads) {
  if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
  cfg.validate();
  const ShiftMatrix a = build_shift(g, ShiftKind::Adjacency);
  RecoveryConfig rc = cfg;
  rc.mode = ShiftKind::Adjacency;

  auto error_of = [&](const Eigen::MatrixXd& covariance, double& eps) {
    SpectralTemplates t = templates_from_covariance(covariance, rc.epsilon);
    t.noisy = true;
    const RecoveryResult r = recover_adjacency(t, rc);
    eps = r.epsilon_used;
    return edge_error(a, ShiftMatrix(ShiftKind::Adjacency, r.binarized));
  };

  NoisyCurve curve;
  curve.q = check_uniqueness(templates_from_shift(a), ShiftKind::Adjacency, std::nullopt, rc.rank_tol).q;
  double unused = 0.0;
  curve.surrogate_error = error_of(filter_covariance(a, h), unused);

  for (int m : sample_sizes) {
    if (m < 1) throw ParameterError("sample sizes must be positive");
    std::vector<double> errors(static_cast<std::size_t>(repetitions), 1.0), eps(errors.size(), 0.0);
    std::vector<char> failed(errors.size(), 0);
    parallel_for(repetitions, threads, [&](int r) {
      const auto k = static_cast<std::size_t>(r);
      try {
        const SignalBatch batch = synthesize_diffused(a, h, m, stream_seed(seed, static_cast<std::uint64_t>(r)));
        errors[k] = error_of(sample_covariance(batch), eps[k]);
      } catch (const Error&) {
        failed[k] = 1;
      }
    });
    NoisyPoint pt;
    pt.m = m;
    pt.repetitions = repetitions;
    for (std::size_t k = 0; k < errors.size(); ++k) {
      pt.mean_error += errors[k];
      pt.mean_epsilon += eps[k];
      pt.failures += failed[k];
    }
    pt.mean_error /= repetitions;
    pt.mean_epsilon /= repetitions;
    double var = 0.0;
    for (double e : errors) var += (e - pt.mean_error) * (e - pt.mean_error);
    pt.std_error = repetitions > 1 ? std::sqrt(var / (repetitions - 1)) : 0.0;
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace spectemp
