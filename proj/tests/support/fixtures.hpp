#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spectemp/lp.hpp"
#include "spectemp/rng.hpp"

namespace spectemp::testing {

Eigen::MatrixXd random_symmetric(int n, Rng& rng);

// Random column sign flips (and optionally a random column permutation).
Eigen::MatrixXd regauge(const Eigen::MatrixXd& v, Rng& rng, bool permute);

// Small random LP for the enumeration oracle: n <= 6 variables, at most 8
// general inequality rows, optionally one equality. Either every variable
// has a lower bound or there are at least n general rows, so the feasible
// set is pointed (almost surely).
LinearProgram random_small_lp(Rng& rng);

// Same as the real thing but spelled out for the 3-node path graph.
Eigen::MatrixXd p3_adjacency_eigenvectors();   // columns for -sqrt2, 0, sqrt2
Eigen::MatrixXd p3_nlaplacian_eigenvectors();  // columns for 0, 1, 2

}  // namespace spectemp::testing
