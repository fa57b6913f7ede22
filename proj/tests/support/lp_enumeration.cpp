#include "support/lp_enumeration.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace spectemp::testing {

namespace {

void for_each_subset(int m, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == k) {
      fn(idx);
      return;
    }
    for (int i = start; i <= m - (k - pos); ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

EnumerationResult enumerate_lp(const LinearProgram& lp, double tol) {
  const int n = lp.num_vars();
  const Eigen::MatrixXd e = Eigen::MatrixXd(lp.a_eq);
  const Eigen::VectorXd eb = lp.b_eq;

  // Inequalities G x <= h including finite bounds.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  const Eigen::MatrixXd ain = Eigen::MatrixXd(lp.a_in);
  for (int i = 0; i < ain.rows(); ++i) {
    rows.push_back(ain.row(i).transpose());
    rhs.push_back(lp.b_in(i));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower(j))) {
      rows.push_back(-Eigen::VectorXd::Unit(n, j));
      rhs.push_back(-lp.lower(j));
    }
    if (std::isfinite(lp.upper(j))) {
      rows.push_back(Eigen::VectorXd::Unit(n, j));
      rhs.push_back(lp.upper(j));
    }
  }
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd g(m, n);
  Eigen::VectorXd h(m);
  for (int i = 0; i < m; ++i) {
    g.row(i) = rows[i].transpose();
    h(i) = rhs[i];
  }

  const int eq_rank = e.rows() > 0 ? static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(e).rank()) : 0;
  auto stacked = [&](const std::vector<int>& subset) {
    Eigen::MatrixXd k(e.rows() + static_cast<Eigen::Index>(subset.size()), n);
    Eigen::VectorXd r(k.rows());
    if (e.rows() > 0) {
      k.topRows(e.rows()) = e;
      r.head(e.rows()) = eb;
    }
    for (std::size_t i = 0; i < subset.size(); ++i) {
      k.row(e.rows() + static_cast<Eigen::Index>(i)) = g.row(subset[i]);
      r(e.rows() + static_cast<Eigen::Index>(i)) = h(subset[i]);
    }
    return std::pair{k, r};
  };
  auto feasible = [&](const Eigen::VectorXd& x) {
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (e.rows() > 0 && (e * x - eb).cwiseAbs().maxCoeff() > tol * scale) return false;
    return m == 0 || (g * x - h).maxCoeff() <= tol * scale;
  };

  EnumerationResult best;
  best.status = LpStatus::Infeasible;
  best.objective = kInf;
  const int k_vertex = n - eq_rank;
  if (k_vertex >= 0 && k_vertex <= m) {
    for_each_subset(m, k_vertex, [&](const std::vector<int>& subset) {
      auto [k, r] = stacked(subset);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
      if (lu.rank() != n) return;
      const Eigen::VectorXd x = lu.solve(r);
      if ((k * x - r).cwiseAbs().maxCoeff() > tol * (1.0 + r.cwiseAbs().maxCoeff())) return;
      if (!feasible(x)) return;
      const double obj = lp.c.dot(x);
      if (best.status == LpStatus::Infeasible || obj < best.objective) {
        best.status = LpStatus::Optimal;
        best.objective = obj;
        best.x = x;
      }
    });
  }
  if (best.status == LpStatus::Infeasible) return best;

  // Extreme rays: one-dimensional solutions of n-1 active homogeneous rows.
  const int k_ray = n - 1 - eq_rank;
  if (k_ray >= 0 && k_ray <= m) {
    bool unbounded = false;
    for_each_subset(m, k_ray, [&](const std::vector<int>& subset) {
      if (unbounded) return;
      auto [k, r] = stacked(subset);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
      if (k.rows() > 0 && lu.rank() != n - 1) return;
      Eigen::VectorXd d = k.rows() > 0 ? Eigen::VectorXd(lu.kernel().col(0)) : Eigen::VectorXd::Unit(n, 0);
      if (n == 1 && k.rows() == 0) d = Eigen::VectorXd::Ones(1);
      d.normalize();
      for (double sign : {1.0, -1.0}) {
        const Eigen::VectorXd dir = sign * d;
        if (m > 0 && (g * dir).maxCoeff() > tol) continue;
        if (lp.c.dot(dir) < -tol) unbounded = true;
      }
    });
    if (unbounded) {
      best.status = LpStatus::Unbounded;
      best.objective = -kInf;
    }
  }
  return best;
}

}  // namespace spectemp::testing
