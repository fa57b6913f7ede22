// spectemp: network topology inference from spectral templates.
//
//   spectemp gen      --n 10 --p 0.2 --seed 7 [--templates] [--signals M --h 1,0.5] --out DIR
//   spectemp recover  (--templates V.csv | --signals X.csv) --mode MODE [--truth g.edges] [--out DIR]
//   spectemp phase    [--config cfg.json] [--n 10,20 --p 0.2,0.4 --trials 50] --out DIR
//   spectemp rankhist [--n 10 --p 0.2 --trials 100] --out DIR
//   spectemp noisy    [--n 20 --p 0.3 | --graph g.edges] [--h 1,0.5 --m 100,1000] --out DIR
//
// Exit codes: 0 success, 2 bad arguments, 3 infeasible recovery, 4 I/O
// error, 1 anything else.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "spectemp/diffusion.hpp"
#include "spectemp/errors.hpp"
#include "spectemp/experiments.hpp"
#include "spectemp/graph.hpp"
#include "spectemp/io.hpp"
#include "spectemp/recovery.hpp"
#include "spectemp/rng.hpp"
#include "spectemp/spectral.hpp"

namespace fs = std::filesystem;
using namespace spectemp;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kOther = 1, kArgs = 2, kInfeasible = 3, kIo = 4 };

// Flags common to every subcommand that runs a recovery.
struct RecoveryFlags {
  std::optional<std::string> mode;
  std::optional<std::string> epsilon;
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<int> max_reweight;

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "adjacency, nlaplacian or claplacian");
    app->add_option("--epsilon", epsilon, "noisy band half-width, or 'auto'");
    app->add_option("--eta", eta, "weight of the -eta*lambda_min term (Laplacian modes)");
    app->add_option("--delta", delta, "reweighting constant");
    app->add_option("--max-reweight", max_reweight, "number of reweighted solves");
  }

  void apply(RecoveryConfig& cfg) const {
    if (mode) cfg.mode = shift_kind_from_string(*mode);
    if (epsilon) {
      if (*epsilon == "auto") {
        cfg.auto_epsilon = true;
        cfg.epsilon = 0.0;
      } else {
        try {
          std::size_t used = 0;
          cfg.epsilon = std::stod(*epsilon, &used);
          if (used != epsilon->size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw ParameterError("--epsilon expects a number or 'auto'");
        }
        cfg.auto_epsilon = false;
      }
    }
    if (eta) cfg.eta = *eta;
    if (delta) cfg.delta = *delta;
    if (max_reweight) cfg.max_reweight = *max_reweight;
    cfg.validate();
  }
};

// Experiment flags layered over a config file.
struct ExperimentFlags {
  std::optional<std::string> config;
  std::vector<int> n;
  std::vector<double> p;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::vector<double> h;
  std::vector<int> m;
  std::optional<int> reps;
  RecoveryFlags recovery;

  void attach(CLI::App* app, bool noisy) {
    app->add_option("--config", config, "JSON experiment config; flags override its values");
    app->add_option("--n", n, "node counts")->delimiter(',');
    app->add_option("--p", p, "edge probabilities")->delimiter(',');
    app->add_option("--seed", seed, "master seed");
    app->add_option("--out", out, "output directory");
    app->add_option("--threads", threads, "worker threads (0: all cores)");
    if (noisy) {
      app->add_option("--h", h, "filter coefficients h0,h1,...")->delimiter(',');
      app->add_option("--m", m, "sample sizes")->delimiter(',');
      app->add_option("--reps", reps, "repetitions per sample size");
    } else {
      app->add_option("--trials", trials, "trials per cell");
    }
    recovery.attach(app);
  }

  ExperimentConfig resolve(ExperimentConfig cfg) const {
    if (config) apply_config_json(load_json(*config), cfg);
    if (!n.empty()) cfg.n_values = n;
    if (!p.empty()) cfg.p_values = p;
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    if (threads) cfg.threads = *threads;
    if (!h.empty()) cfg.filter = h;
    if (!m.empty()) cfg.sample_sizes = m;
    if (reps) cfg.repetitions = *reps;
    recovery.apply(cfg.recovery);
    cfg.validate();
    return cfg;
  }
};

FilterSpec to_filter(const std::vector<double>& h) {
  return FilterSpec(Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size())));
}

nlohmann::json manifest(const std::string& command, const ExperimentConfig& cfg, const nlohmann::json& extra) {
  nlohmann::json j;
  j["tool"] = "spectemp";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = to_json(cfg);
  // Keeps manifests of identical runs identical wherever they are written.
  j["config"].erase("out_dir");
  j["rng"] = "mt19937_64; stream k of seed s is seeded from splitmix64(s, k)";
  j["connectivity"] = "disconnected Erdos-Renyi draws are redrawn, at most 1000 times per trial; "
                      "a trial that never connects is dropped and flags its cell as degenerate";
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string mode = "adjacency";
  bool templates = false;
  bool allow_disconnected = false;
  std::optional<int> signals;
  std::vector<double> h{1.0, 0.5};
};

int run_gen(const GenArgs& a) {
  if (a.n < 2) throw ParameterError("--n must be >= 2");
  std::optional<Graph> g;
  if (a.allow_disconnected) {
    g = erdos_renyi(a.n, a.p, a.seed);
  } else {
    if (!(a.p >= 0.0 && a.p <= 1.0)) throw ParameterError("--p must lie in [0, 1]");
    g = connected_erdos_renyi(a.n, a.p, a.seed, kMaxResample);
    if (!g) throw ParameterError("no connected graph in 1000 draws; pass --allow-disconnected");
  }
  const fs::path dir(a.out);
  save_edge_list(dir / "graph.edges", *g);
  std::cout << "wrote " << (dir / "graph.edges").string() << "\n";
  const ShiftKind kind = shift_kind_from_string(a.mode);
  if (a.templates) {
    save_matrix_csv(dir / "templates.csv", templates_from_shift(build_shift(*g, kind)).v);
    std::cout << "wrote " << (dir / "templates.csv").string() << "\n";
  }
  if (a.signals) {
    if (*a.signals < 1) throw ParameterError("--signals must be >= 1");
    const SignalBatch batch = synthesize_diffused(build_shift(*g, kind), to_filter(a.h), *a.signals, a.seed);
    save_matrix_csv(dir / "signals.csv", batch.data());
    std::cout << "wrote " << (dir / "signals.csv").string() << "\n";
  }
  return kOk;
}

struct RecoverArgs {
  std::optional<std::string> templates;
  std::optional<std::string> signals;
  std::optional<std::string> truth;
  std::optional<std::string> degrees;
  std::optional<std::string> out;
  RecoveryFlags flags;
};

int run_recover(const RecoverArgs& a) {
  if (a.templates.has_value() == a.signals.has_value())
    throw ParameterError("give exactly one of --templates and --signals");
  RecoveryConfig cfg;
  a.flags.apply(cfg);

  SpectralTemplates t;
  if (a.templates) {
    t.v = load_matrix_csv(*a.templates);
    if (t.v.rows() != t.v.cols()) throw ParameterError("templates must be a square matrix");
  } else {
    const SignalBatch batch(load_matrix_csv(*a.signals));
    t = templates_from_covariance(sample_covariance(batch), cfg.epsilon);
    t.noisy = true;
  }

  std::optional<Graph> truth;
  if (a.truth) truth = load_edge_list(*a.truth);
  std::optional<Eigen::VectorXd> d;
  if (a.degrees) {
    const Eigen::MatrixXd m = load_matrix_csv(*a.degrees);
    d = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  } else if (truth) {
    d = spectemp::degrees(*truth);
  }

  const RecoveryResult r = recover(t, cfg, d);
  nlohmann::json j = to_json(r);
  if (truth) {
    if (truth->num_nodes() != t.size()) throw ParameterError("--truth has a different node count");
    j["edge_error"] = edge_error(build_shift(*truth, ShiftKind::Adjacency), ShiftMatrix(ShiftKind::Adjacency, r.binarized));
  }
  if (a.out) {
    save_json(fs::path(*a.out) / "recovery.json", j);
    std::cout << "wrote " << (fs::path(*a.out) / "recovery.json").string() << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return kOk;
}

int run_phase_cmd(const ExperimentFlags& f) {
  const ExperimentConfig cfg = f.resolve(ExperimentConfig{});
  const std::vector<PhaseCell> cells = run_phase(cfg);
  const fs::path dir(cfg.out_dir);
  save_table_csv(dir / "phase.csv", phase_table(cells));
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t k = 0; k < cells.size(); ++k) seeds.push_back(stream_seed(cfg.seed, k));
  save_json(dir / "manifest.json", manifest("phase", cfg, {{"cell_seeds", seeds}}));
  write_table_csv(std::cout, phase_table(cells));
  return kOk;
}

int run_rankhist_cmd(const ExperimentFlags& f) {
  ExperimentConfig base;
  base.n_values = {10};
  base.p_values = {0.2};
  base.trials = 100;
  base.recovery.mode = ShiftKind::NormalizedLaplacian;
  const ExperimentConfig cfg = f.resolve(base);
  const RankHistogram hist =
      run_rankhist(cfg.n_values.front(), cfg.p_values.front(), cfg.trials, cfg.seed, cfg.recovery, cfg.threads);
  const fs::path dir(cfg.out_dir);
  save_table_csv(dir / "rankhist.csv", rankhist_table(hist));
  save_json(dir / "manifest.json", manifest("rankhist", cfg,
                                            {{"trials_sampled", hist.trials},
                                             {"trials_unsampled", hist.unsampled},
                                             {"failures", hist.failures}}));
  write_table_csv(std::cout, rankhist_table(hist));
  return kOk;
}

int run_noisy_cmd(const ExperimentFlags& f, const std::optional<std::string>& graph_file) {
  ExperimentConfig base;
  base.n_values = {20};
  base.p_values = {0.3};
  const ExperimentConfig cfg = f.resolve(base);
  Graph g(1);
  if (graph_file) {
    g = load_edge_list(*graph_file);
  } else {
    const auto drawn = connected_erdos_renyi(cfg.n_values.front(), cfg.p_values.front(), cfg.seed, kMaxResample);
    if (!drawn) throw ParameterError("no connected graph in 1000 draws");
    g = *drawn;
  }
  const NoisyCurve curve =
      run_noisy(g, to_filter(cfg.filter), cfg.sample_sizes, cfg.repetitions, stream_seed(cfg.seed, 1), cfg.recovery,
                cfg.threads);
  const fs::path dir(cfg.out_dir);
  save_table_csv(dir / "noisy.csv", noisy_table(curve));
  save_edge_list(dir / "graph.edges", g);
  save_json(dir / "manifest.json", manifest("noisy", cfg, nlohmann::json{{"q", curve.q}, {"signal_seed", stream_seed(cfg.seed, 1)}}));
  write_table_csv(std::cout, noisy_table(curve));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network topology inference from spectral templates"};
  // No -h: "--h" carries filter coefficients.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "draw a graph and optionally its templates and diffused signals");
  gen_cmd->add_option("--n", gen.n, "node count")->required();
  gen_cmd->add_option("--p", gen.p, "edge probability")->required();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "output directory");
  gen_cmd->add_option("--mode", gen.mode, "shift used for templates and signals");
  gen_cmd->add_flag("--templates", gen.templates, "write the shift's eigenvectors to templates.csv");
  gen_cmd->add_flag("--allow-disconnected", gen.allow_disconnected, "keep the first draw even if disconnected");
  gen_cmd->add_option("--signals", gen.signals, "number of diffused signals to write to signals.csv");
  gen_cmd->add_option("--h", gen.h, "filter coefficients h0,h1,...")->delimiter(',');

  RecoverArgs rec;
  CLI::App* rec_cmd = app.add_subcommand("recover", "recover a shift from templates or signals");
  rec_cmd->add_option("--templates", rec.templates, "CSV of the eigenvector matrix V");
  rec_cmd->add_option("--signals", rec.signals, "CSV of signals (rows = nodes); templates come from their covariance");
  rec_cmd->add_option("--truth", rec.truth, "edge list to score the result against");
  rec_cmd->add_option("--degrees", rec.degrees, "CSV degree vector (combinatorial Laplacian)");
  rec_cmd->add_option("--out", rec.out, "directory for recovery.json (default: stdout)");
  rec.flags.attach(rec_cmd);

  ExperimentFlags phase;
  CLI::App* phase_cmd = app.add_subcommand("phase", "uniqueness and recovery rates over an (N, p) grid");
  phase.attach(phase_cmd, false);

  ExperimentFlags rank;
  CLI::App* rank_cmd = app.add_subcommand("rankhist", "histogram of rank(W) over random graphs");
  rank.attach(rank_cmd, false);

  ExperimentFlags noisy;
  std::optional<std::string> noisy_graph;
  CLI::App* noisy_cmd = app.add_subcommand("noisy", "edge error against the number of observed signals");
  noisy.attach(noisy_cmd, true);
  noisy_cmd->add_option("--graph", noisy_graph, "edge list to use instead of a random graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgs;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*rec_cmd) return run_recover(rec);
    if (*phase_cmd) return run_phase_cmd(phase);
    if (*rank_cmd) return run_rankhist_cmd(rank);
    if (*noisy_cmd) return run_noisy_cmd(noisy, noisy_graph);
  } catch (const InfeasibleTemplates& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kArgs;
  } catch (const MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kArgs;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
