#include "spectemp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "spectemp/errors.hpp"

namespace spectemp {

void LinearProgram::validate() const {
  const Eigen::Index n = c.size();
  if (n == 0) throw DimensionMismatch("linear program has no variables");
  if (!c.allFinite()) throw ParameterError("objective coefficients must be finite");
  if (a_eq.rows() > 0 && a_eq.cols() != n) throw DimensionMismatch("a_eq column count differs from c");
  if (a_in.rows() > 0 && a_in.cols() != n) throw DimensionMismatch("a_in column count differs from c");
  if (b_eq.size() != a_eq.rows()) throw DimensionMismatch("b_eq length differs from a_eq rows");
  if (b_in.size() != a_in.rows()) throw DimensionMismatch("b_in length differs from a_in rows");
  if (lower.size() != n || upper.size() != n) throw DimensionMismatch("bound vectors must match c");
  if (!b_eq.allFinite() || !b_in.allFinite()) throw ParameterError("right-hand sides must be finite");
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInf || upper(j) == -kInf)
      throw ParameterError("invalid bound on variable " + std::to_string(j));
}

int LpBuilder::add_variable(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<int>(cost_.size()) - 1;
}

void LpBuilder::set_cost(int var, double cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }

void LpBuilder::add_le(const Row& row, double rhs) {
  const int i = static_cast<int>(b_in_.size());
  for (const auto& [j, a] : row)
    if (a != 0.0) in_.emplace_back(i, j, a);
  b_in_.push_back(rhs);
}

void LpBuilder::add_ge(const Row& row, double rhs) {
  Row neg = row;
  for (auto& entry : neg) entry.second = -entry.second;
  add_le(neg, -rhs);
}

void LpBuilder::add_eq(const Row& row, double rhs) {
  const int i = static_cast<int>(b_eq_.size());
  for (const auto& [j, a] : row)
    if (a != 0.0) eq_.emplace_back(i, j, a);
  b_eq_.push_back(rhs);
}

LinearProgram LpBuilder::build() const {
  const auto n = static_cast<Eigen::Index>(cost_.size());
  LinearProgram lp;
  lp.c = Eigen::Map<const Eigen::VectorXd>(cost_.data(), n);
  lp.lower = Eigen::Map<const Eigen::VectorXd>(lower_.data(), n);
  lp.upper = Eigen::Map<const Eigen::VectorXd>(upper_.data(), n);
  lp.a_eq.resize(static_cast<Eigen::Index>(b_eq_.size()), n);
  lp.a_eq.setFromTriplets(eq_.begin(), eq_.end());
  lp.b_eq = Eigen::Map<const Eigen::VectorXd>(b_eq_.data(), static_cast<Eigen::Index>(b_eq_.size()));
  lp.a_in.resize(static_cast<Eigen::Index>(b_in_.size()), n);
  lp.a_in.setFromTriplets(in_.begin(), in_.end());
  lp.b_in = Eigen::Map<const Eigen::VectorXd>(b_in_.data(), static_cast<Eigen::Index>(b_in_.size()));
  return lp;
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

// min c^T x  s.t.  A x = b,  G x <= h, after dropping empty rows and scaling
// every row to unit 2-norm and c by a power of two.
struct ScaledForm {
  SparseRowMatrix g;
  Eigen::VectorXd h;
  Eigen::MatrixXd a;  // equality rows are few; kept dense
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double c_scale = 1.0;
  std::vector<Eigen::Index> g_origin;  // index into the certificate layout
  std::vector<double> g_row_scale;
  std::vector<Eigen::Index> a_origin;
  std::vector<double> a_row_scale;
};

// Certificate layout: [eq rows | in rows | lower bounds | upper bounds].
struct Layout {
  Eigen::Index n_eq, n_in, n;
  Eigen::Index size() const { return n_eq + n_in + 2 * n; }
  Eigen::Index in(Eigen::Index i) const { return n_eq + i; }
  Eigen::Index lo(Eigen::Index j) const { return n_eq + n_in + j; }
  Eigen::Index up(Eigen::Index j) const { return n_eq + n_in + n + j; }
};

constexpr double kMaxRowBoost = 1e4;

struct TrivialInfeasibility {
  bool found = false;
  Eigen::Index slot = 0;
  double sign = 1.0;
};

ScaledForm make_scaled_form(const LinearProgram& lp, const Layout& layout, TrivialInfeasibility& trivial) {
  const Eigen::Index n = lp.num_vars();
  ScaledForm f;
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> h;

  // Rows are scaled to unit norm, except that no row is scaled up by more
  // than kMaxRowBoost relative to the largest one: a row that is tiny only
  // through rounding would otherwise come with an enormous right-hand side.
  double max_norm = 1.0;
  for (Eigen::Index i = 0; i < lp.a_in.rows(); ++i) max_norm = std::max(max_norm, lp.a_in.row(i).norm());
  const double min_norm = max_norm / kMaxRowBoost;

  auto push_row = [&](const std::vector<std::pair<Eigen::Index, double>>& entries, double rhs, Eigen::Index slot) {
    double norm2 = 0.0;
    for (const auto& e : entries) norm2 += e.second * e.second;
    if (norm2 == 0.0) {
      if (rhs < 0.0 && !trivial.found) trivial = {true, slot, 1.0};
      return;
    }
    const double scale = 1.0 / std::max(std::sqrt(norm2), min_norm);
    const auto row = static_cast<Eigen::Index>(h.size());
    for (const auto& e : entries) trip.emplace_back(row, e.first, e.second * scale);
    h.push_back(rhs * scale);
    f.g_origin.push_back(slot);
    f.g_row_scale.push_back(scale);
  };

  std::vector<std::pair<Eigen::Index, double>> entries;
  for (Eigen::Index i = 0; i < lp.a_in.rows(); ++i) {
    entries.clear();
    for (SparseRowMatrix::InnerIterator it(lp.a_in, i); it; ++it)
      if (it.value() != 0.0) entries.emplace_back(it.col(), it.value());
    push_row(entries, lp.b_in(i), layout.in(i));
  }
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isfinite(lp.lower(j))) push_row({{j, -1.0}}, -lp.lower(j), layout.lo(j));
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isfinite(lp.upper(j))) push_row({{j, 1.0}}, lp.upper(j), layout.up(j));

  f.g.resize(static_cast<Eigen::Index>(h.size()), n);
  f.g.setFromTriplets(trip.begin(), trip.end());
  f.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));

  std::vector<Eigen::VectorXd> arows;
  std::vector<double> b;
  for (Eigen::Index i = 0; i < lp.a_eq.rows(); ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (SparseRowMatrix::InnerIterator it(lp.a_eq, i); it; ++it) row(it.col()) += it.value();
    const double norm = row.norm();
    if (norm == 0.0) {
      if (lp.b_eq(i) != 0.0 && !trivial.found) trivial = {true, i, lp.b_eq(i) > 0.0 ? -1.0 : 1.0};
      continue;
    }
    arows.push_back(row / norm);
    b.push_back(lp.b_eq(i) / norm);
    f.a_origin.push_back(i);
    f.a_row_scale.push_back(1.0 / norm);
  }
  f.a.resize(static_cast<Eigen::Index>(arows.size()), n);
  for (std::size_t i = 0; i < arows.size(); ++i) f.a.row(static_cast<Eigen::Index>(i)) = arows[i].transpose();
  f.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));

  const double cmax = lp.c.cwiseAbs().maxCoeff();
  f.c_scale = cmax > 0.0 ? std::exp2(std::round(std::log2(cmax))) : 1.0;
  f.c = lp.c / f.c_scale;
  return f;
}

// Solves [H A^T; A 0] [u; v] = [r1; r2] for H = G^T D G. Without equality
// rows H is factored by Cholesky; with them the (lightly regularized) KKT
// matrix goes through a pivoted LU. Two steps of iterative refinement against
// the unregularized system recover the accuracy lost to regularization.
class KktSolver {
 public:
  bool factor(const SparseRowMatrix& g, const Eigen::VectorXd& d, const Eigen::MatrixXd& a) {
    const Eigen::Index n = g.cols();
    h_.setZero(n, n);
    std::vector<std::pair<Eigen::Index, double>> nz;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      nz.clear();
      for (SparseRowMatrix::InnerIterator it(g, i); it; ++it) nz.emplace_back(it.col(), it.value());
      const double di = d(i);
      for (std::size_t p = 0; p < nz.size(); ++p) {
        const double w = di * nz[p].second;
        for (std::size_t q = p; q < nz.size(); ++q) h_(nz[p].first, nz[q].first) += w * nz[q].second;
      }
    }
    h_.triangularView<Eigen::StrictlyLower>() = h_.transpose();
    a_ = &a;
    const double reg = 1e-15 * std::max(1.0, h_.diagonal().maxCoeff());
    if (a.rows() == 0) {
      ldlt_.compute(h_);
      use_ldlt_ = true;
      return ldlt_.info() == Eigen::Success;
    }
    const Eigen::Index p = a.rows();
    Eigen::MatrixXd k(n + p, n + p);
    k.topLeftCorner(n, n) = h_;
    k.topLeftCorner(n, n).diagonal().array() += reg;
    k.topRightCorner(n, p) = a.transpose();
    k.bottomLeftCorner(p, n) = a;
    k.bottomRightCorner(p, p) = -reg * Eigen::MatrixXd::Identity(p, p);
    lu_.compute(k);
    use_ldlt_ = false;
    return std::isfinite(lu_.rcond()) && lu_.rcond() > 0.0;
  }

  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    const Eigen::Index n = h_.rows();
    const Eigen::Index p = a_->rows();
    Eigen::VectorXd rhs(n + p);
    rhs << r1, r2;
    Eigen::VectorXd sol = raw_solve(rhs);
    for (int step = 0; step < 2; ++step) {
      Eigen::VectorXd res(n + p);
      res.head(n) = rhs.head(n) - h_ * sol.head(n);
      if (p > 0) {
        res.head(n) -= a_->transpose() * sol.tail(p);
        res.tail(p) = rhs.tail(p) - (*a_) * sol.head(n);
      }
      sol += raw_solve(res);
    }
    u = sol.head(n);
    v = sol.tail(p);
  }

 private:
  Eigen::VectorXd raw_solve(const Eigen::VectorXd& rhs) const {
    if (use_ldlt_) return ldlt_.solve(rhs);
    return lu_.solve(rhs);
  }

  Eigen::MatrixXd h_;
  const Eigen::MatrixXd* a_ = nullptr;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool use_ldlt_ = true;
};

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  return alpha;
}

constexpr double kMinStep = 1e-10;
constexpr double kFallbackFactor = 100.0;
constexpr double kFallbackFloor = 1e-6;

double max_step(double v, double dv) { return dv < 0.0 ? -v / dv : kInf; }

struct Direction {
  Eigen::VectorXd dx, dy, dz, ds;
  double dtau = 0.0, dkappa = 0.0;
};

double primal_violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (lp.a_eq.rows() > 0) v = std::max(v, (lp.a_eq * x - lp.b_eq).cwiseAbs().maxCoeff());
  if (lp.a_in.rows() > 0) v = std::max(v, (lp.a_in * x - lp.b_in).maxCoeff());
  v = std::max(v, (lp.lower - x).maxCoeff());
  v = std::max(v, (x - lp.upper).maxCoeff());
  return std::max(v, 0.0);
}

}  // namespace

void write_lp_text(std::ostream& out, const LinearProgram& lp) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  auto num = [&](double x) -> std::ostream& {
    if (std::isinf(x)) return out << std::setw(25) << (x > 0 ? "inf" : "-inf");
    return out << std::setw(25) << x;
  };
  out << std::left << std::setw(5) << "LP" << std::right << std::setw(8) << lp.num_vars() << std::setw(8)
      << lp.a_eq.rows() << std::setw(8) << lp.a_in.rows() << '\n';
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) {
    out << std::left << std::setw(5) << "C" << std::right << std::setw(8) << j;
    num(lp.c(j)) << '\n';
  }
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) {
    out << std::left << std::setw(5) << "BND" << std::right << std::setw(8) << j;
    num(lp.lower(j));
    num(lp.upper(j)) << '\n';
  }
  auto dump_rows = [&](const char* tag, const char* rhs_tag, const SparseRowMatrix& m, const Eigen::VectorXd& rhs) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (SparseRowMatrix::InnerIterator it(m, i); it; ++it) {
        out << std::left << std::setw(5) << tag << std::right << std::setw(8) << i << std::setw(8) << it.col();
        num(it.value()) << '\n';
      }
      out << std::left << std::setw(5) << rhs_tag << std::right << std::setw(8) << i;
      num(rhs(i)) << '\n';
    }
  };
  dump_rows("EQ", "BEQ", lp.a_eq, lp.b_eq);
  dump_rows("IN", "BIN", lp.a_in, lp.b_in);
  out.flags(flags);
  out.precision(prec);
}

LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  if (options.dump) write_lp_text(*options.dump, lp);

  const Eigen::Index n = lp.num_vars();
  const Layout layout{lp.a_eq.rows(), lp.a_in.rows(), n};
  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  sol.y_eq = Eigen::VectorXd::Zero(layout.n_eq);
  sol.z_in = Eigen::VectorXd::Zero(layout.n_in);

  for (Eigen::Index j = 0; j < n; ++j) {
    if (lp.lower(j) > lp.upper(j)) {
      sol.status = LpStatus::Infeasible;
      sol.residuals.certificate = Eigen::VectorXd::Zero(layout.size());
      const double gap = lp.lower(j) - lp.upper(j);
      sol.residuals.certificate(layout.lo(j)) = 1.0 / gap;
      sol.residuals.certificate(layout.up(j)) = 1.0 / gap;
      return sol;
    }
  }

  TrivialInfeasibility trivial;
  const ScaledForm f = make_scaled_form(lp, layout, trivial);
  if (trivial.found) {
    sol.status = LpStatus::Infeasible;
    sol.residuals.certificate = Eigen::VectorXd::Zero(layout.size());
    // A zero row with a negative right-hand side (or an inconsistent empty
    // equality) is its own certificate.
    const Eigen::Index slot = trivial.slot;
    const double rhs = slot < layout.n_eq ? lp.b_eq(slot) : lp.b_in(slot - layout.n_eq);
    sol.residuals.certificate(slot) = trivial.sign / std::abs(rhs);
    return sol;
  }

  const Eigen::Index m = f.g.rows();
  const Eigen::Index p = f.a.rows();
  const double tol = options.tolerance;
  const double fallback_merit = std::max(kFallbackFloor, kFallbackFactor * tol);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(m);
  double tau = 1.0, kappa = 1.0;

  const double res_x0 = std::max(1.0, f.c.norm());
  const double res_y0 = std::max(1.0, f.b.norm());
  const double res_z0 = std::max(1.0, f.h.norm());
  const SparseRowMatrix gt = f.g.transpose();

  // Best iterate seen so far. Near the solution the Newton system can become
  // too ill conditioned to produce a usable direction; the run then falls
  // back to this point if it is accurate enough.
  struct Iterate {
    double merit = kInf;
    Eigen::VectorXd x, y, z, s;
    double tau = 1.0, kappa = 1.0;
  } best;
  bool stalled = false;

  KktSolver kkt;
  int iter = 0;
  for (;; ++iter) {
    // Residuals of the homogeneous model.
    const Eigen::VectorXd gx = f.g * x;
    const Eigen::VectorXd rx = f.a.transpose() * y + gt * z + f.c * tau;
    const Eigen::VectorXd ry = f.b * tau - f.a * x;
    const Eigen::VectorXd rz = f.h * tau - gx - s;
    const double cx = f.c.dot(x);
    const double by_hz = f.b.dot(y) + f.h.dot(z);
    const double rt = -cx - by_hz - kappa;
    const double mu = (s.dot(z) + tau * kappa) / static_cast<double>(m + 1);

    const double pres = std::max(ry.norm() / res_y0, rz.norm() / res_z0) / tau;
    const double dres = rx.norm() / res_x0 / tau;
    const double pcost = cx / tau;
    const double dcost = -by_hz / tau;
    const double gap = std::max(s.dot(z) / (tau * tau), std::abs(pcost - dcost));

    const double merit = std::max({pres, dres, gap / (1.0 + std::abs(pcost))});
    if (std::isfinite(merit) && merit < best.merit) best = {merit, x, y, z, s, tau, kappa};
    if (pres <= tol && dres <= tol && gap <= tol * (1.0 + std::abs(pcost))) {
      sol.status = LpStatus::Optimal;
      break;
    }
    // Certificate ratios. Rows of A and G have unit norm, so the residual
    // norms are already on a common scale; dividing by ||b|| or ||h|| would
    // let one loose row mask a violated one.
    if (by_hz < 0.0) {
      const double pinf = (f.a.transpose() * y + gt * z).norm() / (-by_hz);
      if (pinf <= tol) {
        sol.status = LpStatus::Infeasible;
        break;
      }
    }
    if (cx < 0.0) {
      const double dinf = std::max((f.a * x).norm(), (gx + s).norm()) / (-cx);
      if (dinf <= tol) {
        sol.status = LpStatus::Unbounded;
        break;
      }
    }
    if (iter == options.max_iterations || !std::isfinite(mu)) {
      stalled = true;
      break;
    }

    const Eigen::VectorXd d = z.cwiseQuotient(s);
    if (!kkt.factor(f.g, d, f.a)) {
      stalled = true;
      break;
    }

    // The dtau column of the reduced system does not depend on the
    // right-hand side, so it is solved once per iteration.
    const Eigen::VectorXd dh = d.cwiseProduct(f.h);
    const Eigen::VectorXd gdh = gt * dh;
    Eigen::VectorXd wx, wy;
    kkt.solve(gdh - f.c, f.b, wx, wy);
    const Eigen::VectorXd c_plus = f.c + gdh;
    // h^T D h - c_plus^T wx - b^T wy written as a squared norm; the direct
    // form cancels catastrophically once D has huge entries.
    const double schur = (f.h - f.g * wx).cwiseProduct(d.cwiseSqrt()).squaredNorm();

    // Newton system of the embedding for right-hand sides r1..r6 (rows: dual
    // residual, equality, inequality, gap, s.z complementarity, tau.kappa).
    auto reduce = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, const Eigen::VectorXd& r3, double r4,
                      const Eigen::VectorXd& r5, double r6) {
      Direction dir;
      const Eigen::VectorXd t = r5.cwiseQuotient(s) + d.cwiseProduct(r3);
      Eigen::VectorXd ux, uy;
      kkt.solve(r1 - gt * t, -r2, ux, uy);
      const double num = r4 + f.h.dot(t) + r6 / tau + c_plus.dot(ux) + f.b.dot(uy);
      dir.dtau = num / (schur + kappa / tau);
      dir.dx = ux + dir.dtau * wx;
      dir.dy = uy + dir.dtau * wy;
      dir.ds = -(f.g * dir.dx) + f.h * dir.dtau - r3;
      dir.dz = (r5 - z.cwiseProduct(dir.ds)).cwiseQuotient(s);
      dir.dkappa = (r6 - kappa * dir.dtau) / tau;
      return dir;
    };
    // One round of refinement against the unreduced system: the reduction
    // divides by s and multiplies by D, which loses digits late in the run.
    auto solve_direction = [&](double eta, const Eigen::VectorXd& rs, double rk) {
      const Eigen::VectorXd r1 = -eta * rx, r2 = -eta * ry, r3 = -eta * rz;
      const double r4 = -eta * rt;
      Direction dir = reduce(r1, r2, r3, r4, rs, rk);
      for (int round = 0; round < 2; ++round) {
        const Eigen::VectorXd e1 = r1 - (f.a.transpose() * dir.dy + gt * dir.dz + f.c * dir.dtau);
        const Eigen::VectorXd e2 = r2 - (-(f.a * dir.dx) + f.b * dir.dtau);
        const Eigen::VectorXd e3 = r3 - (-(f.g * dir.dx) + f.h * dir.dtau - dir.ds);
        const double e4 = r4 - (-f.c.dot(dir.dx) - f.b.dot(dir.dy) - f.h.dot(dir.dz) - dir.dkappa);
        const Eigen::VectorXd e5 = rs - (z.cwiseProduct(dir.ds) + s.cwiseProduct(dir.dz));
        const double e6 = rk - (kappa * dir.dtau + tau * dir.dkappa);
        const Direction corr = reduce(e1, e2, e3, e4, e5, e6);
        dir.dx += corr.dx;
        dir.dy += corr.dy;
        dir.dz += corr.dz;
        dir.ds += corr.ds;
        dir.dtau += corr.dtau;
        dir.dkappa += corr.dkappa;
      }
      return dir;
    };
    auto step_length = [&](const Direction& dir) {
      return std::min({max_step(s, dir.ds), max_step(z, dir.dz), max_step(tau, dir.dtau), max_step(kappa, dir.dkappa)});
    };

    const Eigen::VectorXd sz = s.cwiseProduct(z);
    const Direction aff = solve_direction(1.0, -sz, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double mu_aff = ((s + alpha_aff * aff.ds).dot(z + alpha_aff * aff.dz) +
                           (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
                          static_cast<double>(m + 1);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Eigen::VectorXd rs = -sz.array() + sigma * mu - aff.ds.cwiseProduct(aff.dz).array();
    const double rk = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
    const Direction dir = solve_direction(1.0 - sigma, rs, rk);
    const double alpha = std::min(1.0, 0.99 * step_length(dir));
    if (!(alpha > kMinStep) && best.merit <= fallback_merit) {
      stalled = true;
      break;
    }

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    z += alpha * dir.dz;
    s += alpha * dir.ds;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;

    // Keep the embedding normalized; the homogeneous model is scale free.
    const double norm = std::max({1.0, tau, kappa});
    if (norm > 1e8) {
      x /= norm;
      y /= norm;
      z /= norm;
      s /= norm;
      tau /= norm;
      kappa /= norm;
    }
  }
  sol.iterations = iter;
  if (stalled) {
    sol.status = LpStatus::NumericalFailure;
    if (best.merit <= fallback_merit) {
      x = best.x;
      y = best.y;
      z = best.z;
      s = best.s;
      tau = best.tau;
      kappa = best.kappa;
      sol.status = LpStatus::Optimal;
    }
  }

  // Map multipliers back to the caller's rows. Row i of the scaled G is
  // g_i * r_i, so the original multiplier is r_i * z_i (and the objective
  // scale comes back in as well).
  auto unscale_multipliers = [&](const Eigen::VectorXd& yy, const Eigen::VectorXd& zz, double factor) {
    Eigen::VectorXd cert = Eigen::VectorXd::Zero(layout.size());
    for (Eigen::Index i = 0; i < p; ++i) cert(f.a_origin[i]) = factor * f.a_row_scale[i] * yy(i);
    for (Eigen::Index i = 0; i < m; ++i) cert(f.g_origin[i]) = factor * f.g_row_scale[i] * zz(i);
    return cert;
  };

  switch (sol.status) {
    case LpStatus::Optimal:
    case LpStatus::NumericalFailure: {
      sol.x = x / tau;
      const Eigen::VectorXd all = unscale_multipliers(y, z, f.c_scale / tau);
      sol.y_eq = all.head(layout.n_eq);
      sol.z_in = all.segment(layout.n_eq, layout.n_in);
      sol.objective = lp.c.dot(sol.x);
      sol.dual_objective = -f.c_scale * (f.b.dot(y) + f.h.dot(z)) / tau;
      sol.residuals.primal = primal_violation(lp, sol.x);
      Eigen::VectorXd grad = lp.c;
      if (layout.n_eq > 0) grad += lp.a_eq.transpose() * sol.y_eq;
      if (layout.n_in > 0) grad += lp.a_in.transpose() * sol.z_in;
      grad -= all.segment(layout.lo(0), n);
      grad += all.segment(layout.up(0), n);
      sol.residuals.dual = grad.cwiseAbs().maxCoeff();
      sol.residuals.gap = std::abs(sol.objective - sol.dual_objective);
      break;
    }
    case LpStatus::Infeasible: {
      const double by_hz = f.b.dot(y) + f.h.dot(z);
      sol.residuals.certificate = unscale_multipliers(y, z, 1.0 / (-by_hz));
      sol.objective = kInf;
      break;
    }
    case LpStatus::Unbounded: {
      const double cx = f.c.dot(x);
      sol.residuals.certificate = x / (-cx * f.c_scale);
      sol.objective = -kInf;
      break;
    }
  }
  return sol;
}

}  // namespace spectemp
