#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace spectemp::testing {

Eigen::MatrixXd random_symmetric(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = normal(rng);
  return m;
}

Eigen::MatrixXd regauge(const Eigen::MatrixXd& v, Rng& rng, bool permute) {
  const auto n = static_cast<int>(v.cols());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (permute) std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution flip(0.5);
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (int k = 0; k < n; ++k) out.col(k) = (flip(rng) ? -1.0 : 1.0) * v.col(order[k]);
  return out;
}

LinearProgram random_small_lp(Rng& rng) {
  std::uniform_int_distribution<int> nvar(1, 6);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = nvar(rng);
  const bool bounded_below = unif(rng) < 0.7;
  std::uniform_int_distribution<int> nrow(bounded_below ? 1 : n, 8);
  const int m = std::max(nrow(rng), bounded_below ? 1 : n);
  const bool with_eq = unif(rng) < 0.3 && n >= 2;
  const bool make_feasible = unif(rng) < 0.6;

  LpBuilder b;
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) {
    const double upper = bounded_below && unif(rng) < 0.3 ? 1.0 + 2.0 * unif(rng) : kInf;
    b.add_variable(normal(rng), bounded_below ? 0.0 : -kInf, upper);
    x0(j) = bounded_below ? unif(rng) * std::min(upper, 2.0) : normal(rng);
  }
  for (int i = 0; i < m; ++i) {
    LpBuilder::Row row;
    double ax = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = normal(rng);
      row.emplace_back(j, a);
      ax += a * x0(j);
    }
    b.add_le(row, make_feasible ? ax + unif(rng) : normal(rng));
  }
  if (with_eq) {
    LpBuilder::Row row;
    double ax = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = normal(rng);
      row.emplace_back(j, a);
      ax += a * x0(j);
    }
    b.add_eq(row, make_feasible ? ax : normal(rng));
  }
  return b.build();
}

Eigen::MatrixXd p3_adjacency_eigenvectors() {
  const double r = std::sqrt(2.0);
  Eigen::MatrixXd v(3, 3);
  v << 0.5, 1.0 / r, 0.5,
      -1.0 / r, 0.0, 1.0 / r,
      0.5, -1.0 / r, 0.5;
  return v;
}

Eigen::MatrixXd p3_nlaplacian_eigenvectors() {
  // L(P3) = I - D^{-1/2} A D^{-1/2}; null vector sqrt(d) = [1, sqrt2, 1] / 2.
  const double r = std::sqrt(2.0);
  Eigen::MatrixXd v(3, 3);
  v << 0.5, 1.0 / r, 0.5,
      1.0 / r, 0.0, -1.0 / r,
      0.5, -1.0 / r, 0.5;
  return v;
}

}  // namespace spectemp::testing
