#include "spectemp/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spectemp/errors.hpp"
#include "spectemp/rng.hpp"

namespace spectemp {

FilterSpec::FilterSpec(Eigen::VectorXd coeffs) : h_(std::move(coeffs)) {
  if (h_.size() < 1) throw ParameterError("filter needs at least one coefficient");
  if (!h_.allFinite()) throw ParameterError("filter coefficients must be finite");
  if ((h_.array() == 0.0).all()) throw ParameterError("filter coefficients are all zero");
}

FilterSpec::FilterSpec(std::initializer_list<double> coeffs)
    : FilterSpec(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(), static_cast<Eigen::Index>(coeffs.size()))) {}

Eigen::MatrixXd FilterSpec::matrix(const ShiftMatrix& s) const {
  return apply_filter(s, *this, Eigen::MatrixXd(Eigen::MatrixXd::Identity(s.size(), s.size())));
}

SignalBatch::SignalBatch(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.cols() < 1 || data_.rows() < 1) throw ParameterError("signal batch needs at least one signal");
  if (!data_.allFinite()) throw ParameterError("signal batch has non-finite entries");
}

Eigen::MatrixXd apply_filter(const ShiftMatrix& s, const FilterSpec& h, const Eigen::MatrixXd& x) {
  if (x.rows() != s.size()) throw DimensionMismatch("apply_filter: signal length does not match shift");
  const Eigen::VectorXd& c = h.coeffs();
  Eigen::MatrixXd y = c(c.size() - 1) * x;
  for (Eigen::Index l = c.size() - 2; l >= 0; --l) y = s.matrix() * y + c(l) * x;
  return y;
}

Eigen::VectorXd apply_filter(const ShiftMatrix& s, const FilterSpec& h, const Eigen::VectorXd& x) {
  return apply_filter(s, h, Eigen::MatrixXd(x)).col(0);
}

SignalBatch synthesize_diffused(const ShiftMatrix& s, const FilterSpec& h, int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("synthesize_diffused: need at least one signal");
  const int n = s.size();
  Eigen::MatrixXd z(n, m);
  for (int start = 0, block = 0; start < m; start += kSeedBlock, ++block) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(block));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int stop = std::min(m, start + kSeedBlock);
    for (int j = start; j < stop; ++j)
      for (int i = 0; i < n; ++i) z(i, j) = normal(rng);
  }
  return SignalBatch(apply_filter(s, h, z));
}

Eigen::MatrixXd sample_covariance(const SignalBatch& batch) {
  const Eigen::MatrixXd& x = batch.data();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
  return c.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd filter_covariance(const ShiftMatrix& s, const FilterSpec& h) {
  const Eigen::MatrixXd hm = h.matrix(s);
  return hm * hm.transpose();
}

SpectralTemplates templates_from_covariance(const Eigen::MatrixXd& c, double eps) {
  if (eps < 0.0) throw ParameterError("templates_from_covariance: slack must be non-negative");
  const EigenDecomposition eig = eig_symmetric(c);
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (eig.values(0) < -1e-8 * scale) throw ContractViolation("templates_from_covariance: matrix is not PSD");
  SpectralTemplates t;
  t.v = eig.vectors;
  t.source = TemplateSource::SampleCovariance;
  t.noisy = eps > 0.0;
  t.epsilon = eps;
  t.degenerate_spectrum = has_degenerate_spectrum(eig.values, c.cwiseAbs().maxCoeff());
  return t;
}

std::vector<int> match_columns(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference) {
  if (estimated.rows() != reference.rows() || estimated.cols() != reference.cols())
    throw DimensionMismatch("match_columns: shapes differ");
  const Eigen::Index n = reference.cols();
  const Eigen::MatrixXd overlap = (reference.transpose() * estimated).cwiseAbs();
  std::vector<int> match(n, -1);
  std::vector<bool> ref_used(n, false), est_used(n, false);
  for (Eigen::Index round = 0; round < n; ++round) {
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ref_used[i]) continue;
      for (Eigen::Index j = 0; j < n; ++j)
        if (!est_used[j] && overlap(i, j) > best) {
          best = overlap(i, j);
          bi = i;
          bj = j;
        }
    }
    ref_used[bi] = est_used[bj] = true;
    match[bi] = static_cast<int>(bj);
  }
  return match;
}

double max_principal_angle(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference) {
  const std::vector<int> match = match_columns(estimated, reference);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < reference.cols(); ++k) {
    const double cosine = std::abs(reference.col(k).normalized().dot(estimated.col(match[k]).normalized()));
    worst = std::max(worst, std::acos(std::min(1.0, cosine)));
  }
  return worst;
}

}  // namespace spectemp
