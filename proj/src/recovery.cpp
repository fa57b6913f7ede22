#include "spectemp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "spectemp/errors.hpp"
#include "spectemp/lp.hpp"

namespace spectemp {

void RecoveryConfig::validate() const {
  if (mode == ShiftKind::GenericSymmetric) throw ParameterError("recovery mode must be adjacency or a Laplacian");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be positive");
  if (max_reweight < 1) throw ParameterError("max_reweight must be at least 1");
  if (!std::isfinite(rank_tol)) throw ParameterError("rank_tol must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be >= 0");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be >= 0");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
    throw ParameterError("binarize_threshold must lie in (0, 1)");
}

namespace {

using Pairs = std::vector<std::pair<int, int>>;

Pairs upper_pairs(int n) {
  Pairs pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

// Row p holds V_ik V_jk, so S_ij = row_p . lambda.
Eigen::MatrixXd pair_products(const Eigen::MatrixXd& v, const Pairs& pairs) {
  Eigen::MatrixXd r(static_cast<Eigen::Index>(pairs.size()), v.cols());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    r.row(static_cast<Eigen::Index>(p)) = v.row(pairs[p].first).cwiseProduct(v.row(pairs[p].second));
  return r;
}

Eigen::MatrixXd reorder_columns(const Eigen::MatrixXd& v, const std::vector<int>& order) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (std::size_t k = 0; k < order.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = v.col(order[k]);
  return out;
}

LpBuilder::Row dense_row(const Eigen::RowVectorXd& coeffs, int first_var, double scale = 1.0) {
  LpBuilder::Row row;
  row.reserve(static_cast<std::size_t>(coeffs.size()));
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    if (coeffs(k) != 0.0) row.emplace_back(first_var + static_cast<int>(k), scale * coeffs(k));
  return row;
}

LpSolution solve_or_throw(const LinearProgram& lp) {
  LpSolution sol = lp_solve(lp);
  switch (sol.status) {
    case LpStatus::Optimal: return sol;
    case LpStatus::Infeasible:
      throw InfeasibleTemplates("no shift of the requested kind has these eigenvectors");
    case LpStatus::Unbounded: throw NumericalFailure("recovery LP reported unbounded");
    case LpStatus::NumericalFailure: break;
  }
  throw NumericalFailure("recovery LP did not converge in " + std::to_string(sol.iterations) + " iterations");
}

struct Solved {
  Eigen::MatrixXd s;
  Eigen::VectorXd lambda;  // working column order
  std::optional<double> lambda_min;
  int iterations = 0;
};

// Which formulation is being assembled.
struct Shape {
  ShiftKind mode;
  int n;
  Pairs pairs;
  Eigen::MatrixXd v;  // working column order (same-sign column first for Laplacians)
  Eigen::MatrixXd r;  // pair_products(v)
  Eigen::VectorXd diag_target;
  double off_lower, off_upper;  // bounds on S_ij, i != j

  bool laplacian() const { return mode != ShiftKind::Adjacency; }
};

Shape make_shape(const SpectralTemplates& templates, ShiftKind mode, const std::optional<Eigen::VectorXd>& d,
                 std::vector<int>& order) {
  Shape sh{mode, templates.size(), upper_pairs(templates.size()), {}, {}, {}, 0.0, 0.0};
  const int n = sh.n;
  order.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  switch (mode) {
    case ShiftKind::Adjacency:
      sh.diag_target = Eigen::VectorXd::Zero(n);
      sh.off_lower = 0.0;
      sh.off_upper = 1.0;
      break;
    case ShiftKind::NormalizedLaplacian:
      order = laplacian_column_order(templates);
      sh.diag_target = Eigen::VectorXd::Ones(n);
      sh.off_lower = -1.0;
      sh.off_upper = 0.0;
      break;
    case ShiftKind::CombinatorialLaplacian:
      if (!d) throw MissingInputError("combinatorial Laplacian recovery needs the degree vector");
      if (d->size() != n) throw DimensionMismatch("degree vector length differs from template size");
      order = laplacian_column_order(templates);
      sh.diag_target = *d;
      sh.off_lower = -d->maxCoeff();
      sh.off_upper = 0.0;
      break;
    case ShiftKind::GenericSymmetric: throw ParameterError("recovery mode must be adjacency or a Laplacian");
  }
  sh.v = reorder_columns(templates.v, order);
  sh.r = pair_products(sh.v, sh.pairs);
  return sh;
}

Eigen::MatrixXd assemble(const Shape& sh, const Eigen::VectorXd& lambda) {
  return sh.v * lambda.asDiagonal() * sh.v.transpose();
}

// Signed cost of S_ij in the l1 objective: |S_ij| = S_ij for adjacency and
// -S_ij for the Laplacians.
double l1_sign(const Shape& sh) { return sh.laplacian() ? -1.0 : 1.0; }

// Noise-free: lambda (or (-1, lambda_2..) for the Laplacians) lies in the
// nullspace of W, so it is parametrized as Z mu and only mu is solved for.
class NoiseFreeSolver {
 public:
  NoiseFreeSolver(const Shape& sh, const Eigen::MatrixXd& z) : sh_(sh), z_(z) {
    Eigen::MatrixXd r = sh.r;
    if (sh.laplacian()) r.col(0).setZero();  // lambda_1 = 0
    b_ = r * z;
    // Entries that vanish in exact arithmetic come out at rounding level;
    // left in, row scaling inside the solver would blow them up.
    const double cut = 1e-11 * b_.cwiseAbs().maxCoeff();
    b_ = b_.unaryExpr([cut](double x) { return std::abs(x) <= cut ? 0.0 : x; });
  }

  Solved operator()(const Eigen::VectorXd& weights, double eta) const {
    const int q = static_cast<int>(z_.cols());
    const int n = sh_.n;
    const double sign = l1_sign(sh_);
    LpBuilder lb;
    for (int k = 0; k < q; ++k) lb.add_variable(0.0);
    Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(q);
    for (Eigen::Index p = 0; p < b_.rows(); ++p) {
      const auto row = dense_row(b_.row(p), 0);
      lb.add_le(row, sh_.off_upper + kFeasibilityFloor);
      lb.add_ge(row, sh_.off_lower - kFeasibilityFloor);
      cost += sign * weights(p) * b_.row(p);
    }
    for (int k = 0; k < q; ++k) lb.set_cost(k, cost(k));
    int t = -1;
    if (sh_.laplacian()) {
      lb.add_eq(dense_row(z_.row(0), 0), -1.0);
      for (int k = 1; k < n; ++k) lb.add_ge(dense_row(z_.row(k), 0), -kFeasibilityFloor);
      if (eta > 0.0) {
        t = lb.add_variable(-eta);
        for (int k = 1; k < n; ++k) {
          auto row = dense_row(z_.row(k), 0, -1.0);
          row.emplace_back(t, 1.0);
          lb.add_le(row, 0.0);
        }
      }
    } else {
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, q);
      for (std::size_t p = 0; p < sh_.pairs.size(); ++p) {
        sums.row(sh_.pairs[p].first) += b_.row(static_cast<Eigen::Index>(p));
        sums.row(sh_.pairs[p].second) += b_.row(static_cast<Eigen::Index>(p));
      }
      for (int i = 0; i < n; ++i) lb.add_ge(dense_row(sums.row(i), 0), 1.0);
    }

    const LpSolution sol = solve_or_throw(lb.build());
    Solved out;
    out.iterations = sol.iterations;
    out.lambda = z_ * sol.x.head(q);
    if (sh_.laplacian()) out.lambda(0) = 0.0;
    if (t >= 0) out.lambda_min = sol.x(t);
    out.s = assemble(sh_, out.lambda);
    return out;
  }

 private:
  const Shape& sh_;
  Eigen::MatrixXd z_;
  Eigen::MatrixXd b_;
};

// Noisy: S entries are variables tied to V diag(lambda) V^T by a band of
// half-width epsilon. Variables are [s_pairs | lambda | (t)]; for the
// Laplacians lambda_1 is fixed at zero and left out.
class NoisySolver {
 public:
  explicit NoisySolver(const Shape& sh) : sh_(sh) {}

  // Smallest epsilon for which the constraint set is nonempty.
  double min_epsilon() const {
    LpBuilder lb;
    const Layout lay = add_variables(lb, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sh_.pairs.size())), 0.0);
    const int e = lb.add_variable(1.0, 0.0);
    add_constraints(lb, lay, std::nullopt, e);
    return std::max(0.0, solve_or_throw(lb.build()).x(e));
  }

  Solved operator()(const Eigen::VectorXd& weights, double eta, double epsilon) const {
    LpBuilder lb;
    const Layout lay = add_variables(lb, weights, eta);
    add_constraints(lb, lay, epsilon, -1);
    const LpSolution sol = solve_or_throw(lb.build());

    Solved out;
    out.iterations = sol.iterations;
    const int n = sh_.n;
    out.lambda = Eigen::VectorXd::Zero(n);
    for (int k = lay.first_k; k < n; ++k) out.lambda(k) = sol.x(lay.lambda + k - lay.first_k);
    if (lay.t >= 0) out.lambda_min = sol.x(lay.t);
    out.s = sh_.diag_target.asDiagonal();
    for (std::size_t p = 0; p < sh_.pairs.size(); ++p) {
      const auto [i, j] = sh_.pairs[p];
      out.s(i, j) = out.s(j, i) = sol.x(static_cast<int>(p));
    }
    return out;
  }

 private:
  struct Layout {
    int lambda = 0;   // index of the first lambda variable
    int first_k = 0;  // working column of that variable
    int t = -1;
  };

  Layout add_variables(LpBuilder& lb, const Eigen::VectorXd& weights, double eta) const {
    const double sign = l1_sign(sh_);
    for (std::size_t p = 0; p < sh_.pairs.size(); ++p)
      lb.add_variable(sign * weights(static_cast<Eigen::Index>(p)), sh_.off_lower, sh_.off_upper);
    Layout lay;
    lay.first_k = sh_.laplacian() ? 1 : 0;
    lay.lambda = lb.num_vars();
    for (int k = lay.first_k; k < sh_.n; ++k) lb.add_variable(0.0, sh_.laplacian() ? 0.0 : -kInf);
    if (sh_.laplacian() && eta > 0.0) {
      lay.t = lb.add_variable(-eta);
      for (int k = lay.first_k; k < sh_.n; ++k) lb.add_le({{lay.t, 1.0}, {lay.lambda + k - lay.first_k, -1.0}}, 0.0);
    }
    return lay;
  }

  // Band rows |target - r.lambda| <= eps, with eps either fixed or the
  // variable eps_var.
  void add_constraints(LpBuilder& lb, const Layout& lay, std::optional<double> eps, int eps_var) const {
    const int n = sh_.n;
    auto band = [&](LpBuilder::Row row, double target) {
      // row encodes (model - variable part); add +-row <= eps +- target.
      LpBuilder::Row neg = row;
      for (auto& [var, coeff] : neg) coeff = -coeff;
      if (eps_var >= 0) {
        row.emplace_back(eps_var, -1.0);
        neg.emplace_back(eps_var, -1.0);
      }
      const double e = eps.value_or(0.0);
      lb.add_le(row, e + target);
      lb.add_le(neg, e - target);
    };
    auto lambda_row = [&](const Eigen::RowVectorXd& coeffs) {
      return dense_row(coeffs.tail(n - lay.first_k), lay.lambda);
    };
    for (std::size_t p = 0; p < sh_.pairs.size(); ++p) {
      LpBuilder::Row row = lambda_row(sh_.r.row(static_cast<Eigen::Index>(p)));
      row.emplace_back(static_cast<int>(p), -1.0);
      band(std::move(row), 0.0);
    }
    for (int i = 0; i < n; ++i) band(lambda_row(sh_.v.row(i).cwiseAbs2()), sh_.diag_target(i));
    if (!sh_.laplacian()) {
      std::vector<LpBuilder::Row> sums(static_cast<std::size_t>(n));
      for (std::size_t p = 0; p < sh_.pairs.size(); ++p) {
        sums[static_cast<std::size_t>(sh_.pairs[p].first)].emplace_back(static_cast<int>(p), 1.0);
        sums[static_cast<std::size_t>(sh_.pairs[p].second)].emplace_back(static_cast<int>(p), 1.0);
      }
      for (const auto& row : sums) lb.add_ge(row, 1.0);
    }
  }

  const Shape& sh_;
};

Eigen::VectorXd upper_entries(const Eigen::MatrixXd& s, const Pairs& pairs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    out(static_cast<Eigen::Index>(p)) = s(pairs[p].first, pairs[p].second);
  return out;
}

template <class Solve>
void reweight(const Shape& sh, const RecoveryConfig& cfg, Solve&& solve, RecoveryResult& out,
              const std::vector<int>& order) {
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(sh.pairs.size()));
  Solved cur;
  for (int it = 0; it < cfg.max_reweight; ++it) {
    Solved next = solve(weights);
    out.lp_iterations += next.iterations;
    const Eigen::VectorXd mags = upper_entries(next.s, sh.pairs).cwiseAbs();
    out.reweight_trace.push_back(2.0 * weights.dot(mags));
    out.support_trace.push_back(2 * static_cast<int>((mags.array() > kSupportTol).count()));
    const bool settled = it > 0 && (next.s - cur.s).cwiseAbs().maxCoeff() < kReweightStop;
    cur = std::move(next);
    if (settled) break;
    weights = (mags.array() + cfg.delta).inverse().matrix();
  }
  out.s_hat = cur.s;
  out.lambda_hat = Eigen::VectorXd::Zero(sh.n);
  for (int k = 0; k < sh.n; ++k) out.lambda_hat(order[static_cast<std::size_t>(k)]) = cur.lambda(k);
  out.lambda_min = cur.lambda_min;
}

bool use_noisy(const SpectralTemplates& templates, const RecoveryConfig& cfg) {
  return cfg.auto_epsilon || cfg.epsilon > 0.0 || templates.noisy;
}

// Columns sorted by their squared entries. Permuted or sign-flipped copies of
// the same basis map to the same order, so the LPs built from them coincide
// and ties between optimal faces are broken the same way.
std::vector<int> canonical_order(const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd sq = v.cwiseAbs2();
  std::vector<int> order(static_cast<std::size_t>(v.cols()));
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ca = sq.col(a), cb = sq.col(b);
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  });
  return order;
}

RecoveryResult run_canonical(const SpectralTemplates& templates, const RecoveryConfig& cfg, ShiftKind mode,
                             const std::optional<Eigen::VectorXd>& d) {
  std::vector<int> order;
  const Shape sh = make_shape(templates, mode, d, order);
  const double tol = cfg.rank_tol > 0.0 ? cfg.rank_tol : default_rank_tol(sh.n);
  const Eigen::MatrixXd w = build_w(templates, mode, d);

  RecoveryResult out;
  out.mode = mode;
  out.degenerate_spectrum = templates.degenerate_spectrum;
  const Eigen::MatrixXd z = nullspace_basis(w, tol);
  out.q = static_cast<int>(z.cols());
  out.unique = out.q == 1;
  out.noisy = use_noisy(templates, cfg);
  const double eta = sh.laplacian() ? cfg.eta : 0.0;

  if (out.noisy) {
    const NoisySolver solver(sh);
    double eps = cfg.epsilon > 0.0 ? cfg.epsilon : templates.epsilon;
    if (cfg.auto_epsilon || !(eps > 0.0)) eps = std::max(1.05 * solver.min_epsilon(), kFeasibilityFloor);
    out.epsilon_used = eps;
    reweight(sh, cfg, [&](const Eigen::VectorXd& wts) { return solver(wts, eta, eps); }, out, order);
  } else {
    if (out.q == 0) throw InfeasibleTemplates("W has a trivial nullspace: only S = 0 fits the templates");
    const NoiseFreeSolver solver(sh, z);
    reweight(sh, cfg, [&](const Eigen::VectorXd& wts) { return solver(wts, eta); }, out, order);
  }

  if (mode == ShiftKind::Adjacency) {
    Binarization b = binarize_adjacency(out.s_hat, cfg.binarize_threshold);
    out.binarized = b.adjacency.matrix();
    out.d_min_estimate = b.d_min_estimate;
  } else {
    out.binarized = support_graph(out.s_hat, kLaplacianSupportTol).adjacency();
  }
  return out;
}

RecoveryResult run(const SpectralTemplates& templates, const RecoveryConfig& cfg, ShiftKind mode,
                   const std::optional<Eigen::VectorXd>& d) {
  cfg.validate();
  if (templates.size() < 2 || templates.v.cols() != templates.v.rows())
    throw DimensionMismatch("templates must be a square matrix with at least 2 rows");
  const std::vector<int> canon = canonical_order(templates.v);
  SpectralTemplates sorted = templates;
  sorted.v = reorder_columns(templates.v, canon);
  RecoveryResult out = run_canonical(sorted, cfg, mode, d);
  const Eigen::VectorXd lambda = out.lambda_hat;
  for (std::size_t k = 0; k < canon.size(); ++k) out.lambda_hat(canon[k]) = lambda(static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace

Uniqueness check_uniqueness(const SpectralTemplates& templates, ShiftKind mode,
                            const std::optional<Eigen::VectorXd>& d, double rank_tol) {
  if (mode == ShiftKind::GenericSymmetric) throw ParameterError("uniqueness is defined for adjacency and Laplacians");
  const int q = nullspace_dim(build_w(templates, mode, d), rank_tol);
  return {q, q == 1};
}

RecoveryResult recover_adjacency(const SpectralTemplates& templates, const RecoveryConfig& cfg) {
  return run(templates, cfg, ShiftKind::Adjacency, std::nullopt);
}

RecoveryResult recover_laplacian(const SpectralTemplates& templates, const RecoveryConfig& cfg,
                                 const std::optional<Eigen::VectorXd>& d) {
  if (cfg.mode == ShiftKind::Adjacency || cfg.mode == ShiftKind::GenericSymmetric)
    throw ParameterError("recover_laplacian needs a Laplacian mode");
  return run(templates, cfg, cfg.mode, d);
}

RecoveryResult recover(const SpectralTemplates& templates, const RecoveryConfig& cfg,
                       const std::optional<Eigen::VectorXd>& d) {
  if (cfg.mode == ShiftKind::Adjacency) return recover_adjacency(templates, cfg);
  return recover_laplacian(templates, cfg, d);
}

Binarization binarize_adjacency(const Eigen::MatrixXd& s_hat, double theta) {
  if (s_hat.rows() != s_hat.cols()) throw DimensionMismatch("shift must be square");
  const Eigen::Index n = s_hat.rows();
  double s_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) s_max = std::max(s_max, s_hat(i, j));
  if (!(s_max > 1e-9)) throw AllZeroRecovery("recovered shift has no positive off-diagonal entry");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::max(s_hat(i, j), s_hat(j, i)) >= theta * s_max) a(i, j) = a(j, i) = 1.0;
  return {ShiftMatrix(ShiftKind::Adjacency, std::move(a)), static_cast<int>(std::lround(1.0 / s_max))};
}

ShiftMatrix rescale_and_binarize(const RecoveryResult& result, const RecoveryConfig& cfg) {
  if (result.mode != ShiftKind::Adjacency) throw ParameterError("rescaling applies to adjacency results only");
  return binarize_adjacency(result.s_hat, cfg.binarize_threshold).adjacency;
}

double edge_error(const ShiftMatrix& a_true, const ShiftMatrix& a_hat) {
  if (a_true.kind() != ShiftKind::Adjacency || a_hat.kind() != ShiftKind::Adjacency)
    throw ParameterError("edge_error compares adjacency matrices");
  if (a_true.size() != a_hat.size()) throw DimensionMismatch("edge_error: sizes differ");
  const auto& t = a_true.matrix();
  const Eigen::Index nnz = (t.array() != 0.0).count();
  if (nnz == 0) throw ParameterError("edge_error: true adjacency has no edges");
  const Eigen::Index diff = (t.array() != a_hat.matrix().array()).count();
  return static_cast<double>(diff) / static_cast<double>(nnz);
}

}  // namespace spectemp
