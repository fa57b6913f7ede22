#pragma once

// Brute-force reference for small linear programs: enumerates every basic
// solution (vertex) and every extreme ray of the recession cone. Only valid
// for pointed feasible sets, i.e. when the inequality rows (bounds included)
// have full column rank.

#include "spectemp/lp.hpp"

namespace spectemp::testing {

struct EnumerationResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

EnumerationResult enumerate_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace spectemp::testing
