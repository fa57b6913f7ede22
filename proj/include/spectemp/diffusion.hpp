#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spectemp/graph.hpp"
#include "spectemp/spectral.hpp"

namespace spectemp {

// Polynomial graph filter H = sum_l h_l S^l. Needs at least one nonzero,
// finite coefficient.
class FilterSpec {
 public:
  explicit FilterSpec(Eigen::VectorXd coeffs);
  FilterSpec(std::initializer_list<double> coeffs);

  const Eigen::VectorXd& coeffs() const { return h_; }
  int length() const { return static_cast<int>(h_.size()); }

  // Dense H for a given shift. Only used where the analytic covariance is
  // wanted; signal synthesis never forms it.
  Eigen::MatrixXd matrix(const ShiftMatrix& s) const;

 private:
  Eigen::VectorXd h_;
};

// N x M matrix of signals, one per column.
class SignalBatch {
 public:
  explicit SignalBatch(Eigen::MatrixXd data);

  const Eigen::MatrixXd& data() const { return data_; }
  int num_nodes() const { return static_cast<int>(data_.rows()); }
  int num_signals() const { return static_cast<int>(data_.cols()); }

 private:
  Eigen::MatrixXd data_;
};

// y = H x by Horner's rule: L-1 shifts, S^l is never formed.
Eigen::VectorXd apply_filter(const ShiftMatrix& s, const FilterSpec& h, const Eigen::VectorXd& x);
Eigen::MatrixXd apply_filter(const ShiftMatrix& s, const FilterSpec& h, const Eigen::MatrixXd& x);

// Columns are H z with z ~ N(0, I). Column blocks of kSeedBlock signals draw
// from their own stream of `seed`, so the batch does not depend on how the
// blocks are scheduled.
inline constexpr int kSeedBlock = 1024;
SignalBatch synthesize_diffused(const ShiftMatrix& s, const FilterSpec& h, int m, std::uint64_t seed);

// (1/M) sum_m x_m x_m^T.
Eigen::MatrixXd sample_covariance(const SignalBatch& batch);

// H H^T, the covariance of diffused white signals.
Eigen::MatrixXd filter_covariance(const ShiftMatrix& s, const FilterSpec& h);

// Principal directions of a covariance as spectral templates.
SpectralTemplates templates_from_covariance(const Eigen::MatrixXd& c, double eps);

// Greedy assignment of estimated columns to reference columns by largest
// |inner product|. Entry k is the estimated column matched to reference
// column k. Evaluation helper only; recovery never uses it.
std::vector<int> match_columns(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference);

// Largest principal angle (radians) between matched column pairs.
double max_principal_angle(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference);

}  // namespace spectemp
