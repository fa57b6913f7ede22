#include "spectemp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectemp/errors.hpp"

namespace spectemp {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kSameSignFloor = 1e-9;

void require_symmetric(const Eigen::MatrixXd& m, double tol, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionMismatch(std::string(what) + ": matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw ContractViolation(std::string(what) + ": matrix is not symmetric");
}

// Largest-magnitude entry positive; near-ties (relative 1e-10) go to the
// lowest index so that e.g. [1,-1]/sqrt2 is always returned as [1,-1]/sqrt2.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-10)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

std::string_view to_string(TemplateSource source) {
  switch (source) {
    case TemplateSource::Exact: return "exact";
    case TemplateSource::SampleCovariance: return "sample_covariance";
    case TemplateSource::OperatorEigenbasis: return "operator_eigenbasis";
  }
  return "unknown";
}

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m) {
  require_symmetric(m, 1e-10, "eig_symmetric");
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = 1e-12 * a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (sweep == kMaxSweeps) throw NumericalFailure("Jacobi eigensolver did not converge in 100 sweeps");
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
    normalize_sign(out.vectors.col(k));
  }
  return out;
}

SingularDecomposition svd_jacobi(const Eigen::MatrixXd& m) {
  const Eigen::Index cols = m.cols();
  Eigen::MatrixXd u = m;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(cols, cols);
  // Inner products carry rounding of order rows * eps, so orthogonality is
  // only asked for to that level.
  const double eps = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Eigen::Index>(m.rows(), 1));
  // Columns below this squared norm are rounding noise; rotating them
  // against each other never settles and changes nothing.
  const double floor2 = std::pow(eps * m.norm(), 2);

  for (int sweep = 0;; ++sweep) {
    if (sweep == kMaxSweeps) throw NumericalFailure("one-sided Jacobi SVD did not converge in 100 sweeps");
    bool rotated = false;
    for (Eigen::Index p = 0; p < cols - 1; ++p) {
      for (Eigen::Index q = p + 1; q < cols; ++q) {
        const double alpha = u.col(p).squaredNorm();
        const double beta = u.col(q).squaredNorm();
        const double gamma = u.col(p).dot(u.col(q));
        if (std::min(alpha, beta) <= floor2 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd up = u.col(p);
        u.col(p) = c * up - s * u.col(q);
        u.col(q) = s * up + c * u.col(q);
        const Eigen::VectorXd vp = v.col(p);
        v.col(p) = c * vp - s * v.col(q);
        v.col(q) = s * vp + c * v.col(q);
      }
    }
    if (!rotated) break;
  }

  Eigen::VectorXd sigma(cols);
  for (Eigen::Index j = 0; j < cols; ++j) sigma(j) = u.col(j).norm();
  std::vector<Eigen::Index> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return sigma(i) > sigma(j); });

  SingularDecomposition out;
  out.values.resize(cols);
  out.right_vectors.resize(cols, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    out.values(k) = sigma(order[k]);
    out.right_vectors.col(k) = v.col(order[k]);
  }
  return out;
}

bool has_degenerate_spectrum(const Eigen::VectorXd& ascending_values, double scale) {
  for (Eigen::Index k = 1; k < ascending_values.size(); ++k)
    if (ascending_values(k) - ascending_values(k - 1) < kDegenerateGap * scale) return true;
  return false;
}

SpectralTemplates templates_from_shift(const ShiftMatrix& s) {
  const EigenDecomposition eig = eig_symmetric(s.matrix());
  SpectralTemplates t;
  t.v = eig.vectors;
  t.source = TemplateSource::Exact;
  t.degenerate_spectrum = has_degenerate_spectrum(eig.values, s.matrix().cwiseAbs().maxCoeff());
  return t;
}

SpectralTemplates templates_from_operator(const Eigen::MatrixXd& b) {
  require_symmetric(b, 1e-10, "templates_from_operator");
  const EigenDecomposition eig = eig_symmetric(b);
  SpectralTemplates t;
  t.v = eig.vectors;
  t.source = TemplateSource::OperatorEigenbasis;
  t.degenerate_spectrum = has_degenerate_spectrum(eig.values, b.cwiseAbs().maxCoeff());
  return t;
}

Eigen::VectorXd gft(const SpectralTemplates& templates, const Eigen::VectorXd& x) {
  if (x.size() != templates.v.rows()) throw DimensionMismatch("gft: signal length does not match templates");
  return templates.v.transpose() * x;
}

Eigen::VectorXd freq_response(const Eigen::VectorXd& h, const Eigen::VectorXd& values) {
  if (h.size() < 1) throw ParameterError("freq_response: filter needs at least one coefficient");
  // Horner evaluation of the Vandermonde product.
  Eigen::VectorXd out = Eigen::VectorXd::Constant(values.size(), h(h.size() - 1));
  for (Eigen::Index l = h.size() - 2; l >= 0; --l) out = out.cwiseProduct(values).array() + h(l);
  return out;
}

int find_degree_eigenvector(const SpectralTemplates& templates) {
  int found = -1;
  int count = 0;
  for (Eigen::Index k = 0; k < templates.v.cols(); ++k) {
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < templates.v.rows(); ++i) {
      const double x = templates.v(i, k);
      if (x > kSameSignFloor) pos = true;
      if (x < -kSameSignFloor) neg = true;
    }
    if (pos != neg) {
      found = static_cast<int>(k);
      ++count;
    }
  }
  if (count != 1)
    throw AmbiguityError(count == 0 ? "no template column has entries of a single sign"
                                    : "several template columns have entries of a single sign");
  return found;
}

std::vector<int> laplacian_column_order(const SpectralTemplates& templates) {
  const int first = find_degree_eigenvector(templates);
  std::vector<int> order{first};
  for (int k = 0; k < templates.v.cols(); ++k)
    if (k != first) order.push_back(k);
  return order;
}

Eigen::MatrixXd build_w(const SpectralTemplates& templates, ShiftKind mode, const std::optional<Eigen::VectorXd>& d) {
  const Eigen::MatrixXd& v = templates.v;
  switch (mode) {
    case ShiftKind::Adjacency:
      return v.cwiseProduct(v);
    case ShiftKind::NormalizedLaplacian:
    case ShiftKind::CombinatorialLaplacian: {
      if (mode == ShiftKind::CombinatorialLaplacian) {
        if (!d) throw MissingInputError("build_w: combinatorial Laplacian mode needs the degree vector");
        if (d->size() != v.rows()) throw DimensionMismatch("build_w: degree vector length does not match templates");
      }
      const std::vector<int> order = laplacian_column_order(templates);
      Eigen::MatrixXd w(v.rows(), v.cols());
      w.col(0) = mode == ShiftKind::NormalizedLaplacian ? Eigen::VectorXd::Ones(v.rows()) : *d;
      for (std::size_t k = 1; k < order.size(); ++k) w.col(k) = v.col(order[k]).cwiseProduct(v.col(order[k]));
      return w;
    }
    case ShiftKind::GenericSymmetric:
      break;
  }
  throw ParameterError("build_w: mode must be adjacency, nlaplacian or claplacian");
}

namespace {

double resolve_tol(const Eigen::MatrixXd& m, double tol_rel) {
  return tol_rel > 0.0 ? tol_rel : default_rank_tol(m.cols());
}

}  // namespace

int nullspace_dim(const Eigen::MatrixXd& m, double tol_rel) {
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) throw DegenerateMatrixError("nullspace_dim: all-zero matrix");
  const SingularDecomposition svd = svd_jacobi(m);
  const double cutoff = resolve_tol(m, tol_rel) * svd.values(0);
  return static_cast<int>((svd.values.array() <= cutoff).count());
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double tol_rel) {
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) throw DegenerateMatrixError("nullspace_basis: all-zero matrix");
  const SingularDecomposition svd = svd_jacobi(m);
  const double cutoff = resolve_tol(m, tol_rel) * svd.values(0);
  const auto q = static_cast<Eigen::Index>((svd.values.array() <= cutoff).count());
  return svd.right_vectors.rightCols(q);
}

}  // namespace spectemp
