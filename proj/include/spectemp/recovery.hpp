#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spectemp/graph.hpp"
#include "spectemp/spectral.hpp"

namespace spectemp {

struct RecoveryConfig {
  ShiftKind mode = ShiftKind::Adjacency;
  double delta = 1e-3;    // reweighting constant: w_ij = 1 / (|S_ij| + delta)
  int max_reweight = 10;  // number of weighted LP solves P
  double rank_tol = 0.0;  // relative singular-value tolerance for Q; <= 0 selects default_rank_tol
  // Slack of the element-wise band |S - V diag(lambda) V^T| <= epsilon. A
  // positive value (or noisy templates) selects the noisy formulation.
  double epsilon = 0.0;
  // Pick epsilon as 1.05 times the smallest feasible band.
  bool auto_epsilon = false;
  double eta = 0.0;  // weight of the -eta * lambda_min term (Laplacian modes)
  double binarize_threshold = 0.5;

  // Throws ParameterError.
  void validate() const;
};

// Noise-free solves clip tiny violations of the sign constraints on S at this
// level; the nullspace basis is only accurate to rounding.
inline constexpr double kFeasibilityFloor = 1e-9;
// Recovered Laplacian entries with |S_ij| above this count as edges.
inline constexpr double kLaplacianSupportTol = 1e-5;
// Support threshold used by support_trace.
inline constexpr double kSupportTol = 1e-6;
// Reweighting stops once successive S-hat differ by less than this (max entry).
inline constexpr double kReweightStop = 1e-8;

struct RecoveryResult {
  ShiftKind mode = ShiftKind::Adjacency;
  Eigen::MatrixXd s_hat;       // continuous recovered shift
  Eigen::MatrixXd binarized;   // 0/1 adjacency of the recovered support
  Eigen::VectorXd lambda_hat;  // indexed like the template columns
  std::optional<double> lambda_min;  // set when eta > 0
  int q = 0;                   // nullspace dimension of W (or W-tilde)
  bool unique = false;         // q == 1
  bool degenerate_spectrum = false;
  bool noisy = false;
  double epsilon_used = 0.0;
  std::vector<double> reweight_trace;  // sum_ij w_ij |S_ij| after each solve
  std::vector<int> support_trace;      // #{(i,j) : |S_ij| > kSupportTol} after each solve
  int lp_iterations = 0;               // summed over all solves
  std::optional<int> d_min_estimate;   // adjacency mode only
};

struct Uniqueness {
  int q = 0;
  bool unique = false;
};

// Q from the nullspace of W (adjacency) or W-tilde (Laplacian modes).
Uniqueness check_uniqueness(const SpectralTemplates& templates, ShiftKind mode,
                            const std::optional<Eigen::VectorXd>& d = std::nullopt, double rank_tol = 0.0);

// Reweighted l1 recovery of a hollow, nonnegative shift with row sums >= 1.
// Throws InfeasibleTemplates when no such shift has these eigenvectors.
RecoveryResult recover_adjacency(const SpectralTemplates& templates, const RecoveryConfig& cfg);

// Reweighted l1 recovery of a normalized (unit diagonal) or combinatorial
// (diagonal d) Laplacian. The same-sign template column is pinned to
// eigenvalue zero and the others are constrained nonnegative.
RecoveryResult recover_laplacian(const SpectralTemplates& templates, const RecoveryConfig& cfg,
                                 const std::optional<Eigen::VectorXd>& d = std::nullopt);

// Dispatch on cfg.mode.
RecoveryResult recover(const SpectralTemplates& templates, const RecoveryConfig& cfg,
                       const std::optional<Eigen::VectorXd>& d = std::nullopt);

struct Binarization {
  ShiftMatrix adjacency;
  int d_min_estimate;
};

// A_ij = 1 where S_ij >= theta * max S (off the diagonal); d_min estimate is
// round(1 / max S). Throws AllZeroRecovery when max S <= 1e-9.
Binarization binarize_adjacency(const Eigen::MatrixXd& s_hat, double theta);

ShiftMatrix rescale_and_binarize(const RecoveryResult& result, const RecoveryConfig& cfg);

// ||A - A_hat||_0 / ||A||_0 over the full symmetric matrices.
double edge_error(const ShiftMatrix& a_true, const ShiftMatrix& a_hat);

}  // namespace spectemp
