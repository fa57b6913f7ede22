#include <sstream>

#include "doctest.h"
#include "spectemp/errors.hpp"
#include "spectemp/lp.hpp"
#include "support/fixtures.hpp"
#include "support/lp_enumeration.hpp"

using namespace spectemp;

TEST_CASE("two-variable covering LP picks the cheap vertex") {
  // min 2 x1 + x2  s.t.  x1 + x2 >= 1,  x in [0,1]^2
  LpBuilder b;
  b.add_variable(2.0, 0.0, 1.0);
  b.add_variable(1.0, 0.0, 1.0);
  b.add_ge({{0, 1.0}, {1, 1.0}}, 1.0);
  const LpSolution sol = lp_solve(b.build());
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(sol.x(1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.dual_objective <= sol.objective + 1e-7);
}

TEST_CASE("contradictory bound rows are certified infeasible") {
  // min x  s.t.  x <= -1, x >= 0
  LpBuilder b;
  b.add_variable(1.0, 0.0);
  b.add_le({{0, 1.0}}, -1.0);
  const LinearProgram lp = b.build();
  const LpSolution sol = lp_solve(lp);
  REQUIRE(sol.status == LpStatus::Infeasible);
  // Farkas: z >= 0 on [in | lower | upper], G^T z = 0 and h^T z = -1.
  const Eigen::VectorXd& cert = sol.residuals.certificate;
  REQUIRE(cert.size() == 1 + 2);
  CHECK(cert.minCoeff() >= -1e-12);
  const double gtz = cert(0) * 1.0 - cert(1);
  const double htz = cert(0) * -1.0 + cert(1) * 0.0;
  CHECK(std::abs(gtz) < 1e-7);
  CHECK(htz == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("crossed variable bounds are infeasible without iterating") {
  LpBuilder b;
  b.add_variable(1.0, 2.0, 1.0);
  const LpSolution sol = lp_solve(b.build());
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK(sol.iterations == 0);
}

TEST_CASE("unbounded ray is reported with a recession certificate") {
  // min -x1  s.t.  x1 - x2 <= 1,  x >= 0
  LpBuilder b;
  b.add_variable(-1.0, 0.0);
  b.add_variable(0.0, 0.0);
  b.add_le({{0, 1.0}, {1, -1.0}}, 1.0);
  const LpSolution sol = lp_solve(b.build());
  REQUIRE(sol.status == LpStatus::Unbounded);
  const Eigen::VectorXd& d = sol.residuals.certificate;
  CHECK(-d(0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(d.minCoeff() >= -1e-7);
  CHECK(d(0) - d(1) <= 1e-7);
}

TEST_CASE("free variables and equality rows") {
  // min |x1 - 3| written as min t s.t. t >= x1 - 3, t >= 3 - x1, x1 + x2 = 5, x2 >= 4
  LpBuilder b;
  const int x1 = b.add_variable(0.0);
  const int x2 = b.add_variable(0.0, 4.0);
  const int t = b.add_variable(1.0);
  b.add_ge({{t, 1.0}, {x1, -1.0}}, -3.0);
  b.add_ge({{t, 1.0}, {x1, 1.0}}, 3.0);
  b.add_eq({{x1, 1.0}, {x2, 1.0}}, 5.0);
  const LpSolution sol = lp_solve(b.build());
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x(x1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("dependent equality rows are tolerated") {
  LpBuilder b;
  b.add_variable(1.0, 0.0);
  b.add_variable(2.0, 0.0);
  b.add_eq({{0, 1.0}, {1, 1.0}}, 1.0);
  b.add_eq({{0, 2.0}, {1, 2.0}}, 2.0);
  const LpSolution sol = lp_solve(b.build());
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));

  LpBuilder bad;
  bad.add_variable(1.0, 0.0);
  bad.add_variable(2.0, 0.0);
  bad.add_eq({{0, 1.0}, {1, 1.0}}, 1.0);
  bad.add_eq({{0, 2.0}, {1, 2.0}}, 3.0);
  CHECK(lp_solve(bad.build()).status == LpStatus::Infeasible);
}

TEST_CASE("malformed programs are rejected at construction") {
  LinearProgram lp = LpBuilder{}.build();
  CHECK_THROWS_AS(lp.validate(), DimensionMismatch);
  LpBuilder b;
  b.add_variable(1.0, 0.0);
  lp = b.build();
  lp.b_in = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(lp_solve(lp), DimensionMismatch);
}

TEST_CASE("iteration cap yields NumericalFailure, not Infeasible") {
  LpBuilder b;
  b.add_variable(1.0, 0.0, 1.0);
  b.add_variable(1.0, 0.0, 1.0);
  b.add_ge({{0, 1.0}, {1, 1.0}}, 1.0);
  LpOptions opts;
  opts.max_iterations = 1;
  CHECK(lp_solve(b.build(), opts).status == LpStatus::NumericalFailure);
}

TEST_CASE("positive objective scaling leaves the optimizer unchanged") {
  Rng rng = make_stream(11);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 60; ++t) {
    LinearProgram lp = testing::random_small_lp(rng);
    const LpSolution base = lp_solve(lp);
    if (base.status != LpStatus::Optimal) continue;
    ++checked;
    for (double factor : {4.0, 0.125, 3.7}) {
      LinearProgram scaled = lp;
      scaled.c *= factor;
      const LpSolution other = lp_solve(scaled);
      REQUIRE(other.status == LpStatus::Optimal);
      if (factor != 3.7) {
        CHECK((other.x - base.x).cwiseAbs().maxCoeff() == 0.0);
      } else {
        CHECK((other.x - base.x).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + base.x.cwiseAbs().maxCoeff()));
      }
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("random LPs agree with vertex enumeration") {
  Rng rng = make_stream(2024);
  int counts[4] = {0, 0, 0, 0};
  for (int t = 0; t < 300; ++t) {
    const LinearProgram lp = testing::random_small_lp(rng);
    const auto oracle = testing::enumerate_lp(lp);
    const LpSolution sol = lp_solve(lp);
    INFO("instance " << t);
    REQUIRE(sol.status == oracle.status);
    counts[static_cast<int>(sol.status)]++;
    if (sol.status == LpStatus::Optimal) {
      CHECK(std::abs(sol.objective - oracle.objective) <= 1e-6 * (1.0 + std::abs(oracle.objective)));
      CHECK(sol.dual_objective <= sol.objective + 1e-7 * (1.0 + std::abs(sol.objective)));
      CHECK(sol.residuals.primal <= 1e-7 * (1.0 + lp.b_in.cwiseAbs().maxCoeff()));
    }
  }
  CHECK(counts[0] > 50);
  CHECK(counts[1] > 10);
  CHECK(counts[2] > 5);
}

TEST_CASE("debug dump uses the fixed-column text layout") {
  LpBuilder b;
  b.add_variable(2.0, 0.0, 1.0);
  b.add_le({{0, 1.0}}, 0.5);
  std::ostringstream out;
  LpOptions opts;
  opts.dump = &out;
  lp_solve(b.build(), opts);
  const std::string text = out.str();
  CHECK(text.rfind("LP ", 0) == 0);
  CHECK(text.find("BND") != std::string::npos);
  CHECK(text.find("IN ") != std::string::npos);
  CHECK(text.find("BIN") != std::string::npos);
}
