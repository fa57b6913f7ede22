#include <cmath>

#include "doctest.h"
#include "spectemp/errors.hpp"
#include "spectemp/graph.hpp"
#include "spectemp/rng.hpp"
#include "spectemp/spectral.hpp"
#include "support/fixtures.hpp"

using namespace spectemp;
using spectemp::testing::random_symmetric;
using spectemp::testing::regauge;

namespace {

const double kSqrt2 = std::sqrt(2.0);

SpectralTemplates wrap(const Eigen::MatrixXd& v) {
  SpectralTemplates t;
  t.v = v;
  return t;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("eig_symmetric on the two-node Laplacian") {
  Eigen::Matrix2d m;
  m << 1, -1, -1, 1;
  const EigenDecomposition e = eig_symmetric(m);
  CHECK(e.values(0) == doctest::Approx(0.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1 / kSqrt2));
  CHECK(e.vectors(0, 0) == doctest::Approx(e.vectors(1, 0)));
}

TEST_CASE("eig_symmetric on the path P3 matches the characteristic polynomial") {
  // det(A - x I) = -x^3 + 2x for A(P3): roots -sqrt2, 0, sqrt2.
  const EigenDecomposition e = eig_symmetric(build_shift(path_graph(3), ShiftKind::Adjacency).matrix());
  CHECK(e.values(0) == doctest::Approx(-kSqrt2).epsilon(1e-12));
  CHECK(std::abs(e.values(1)) <= 1e-14);
  CHECK(e.values(2) == doctest::Approx(kSqrt2).epsilon(1e-12));
  for (int k = 0; k < 3; ++k) {
    const double x = e.values(k);
    CHECK(std::abs(-x * x * x + 2 * x) <= 1e-12);
  }
  const Eigen::MatrixXd ref = spectemp::testing::p3_adjacency_eigenvectors();
  for (int k = 0; k < 3; ++k) CHECK(std::abs(e.vectors.col(k).dot(ref.col(k))) == doctest::Approx(1.0));
}

TEST_CASE("eig_symmetric on the identity") {
  const EigenDecomposition e = eig_symmetric(Eigen::Matrix3d::Identity());
  CHECK(e.values == Eigen::Vector3d::Ones());
  CHECK(max_abs(e.vectors.transpose() * e.vectors - Eigen::Matrix3d::Identity()) <= 1e-15);
}

TEST_CASE("eig_symmetric rejects asymmetric and non-square input") {
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(eig_symmetric(m), ContractViolation);
  CHECK_THROWS_AS(eig_symmetric(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("eig_symmetric round trip on random symmetric matrices") {
  Rng rng = make_stream(11);
  std::uniform_int_distribution<int> size(1, 50);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd s = random_symmetric(size(rng), rng);
    const EigenDecomposition e = eig_symmetric(s);
    const Eigen::MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    worst = std::max(worst, max_abs(back - s) / max_abs(s));
    for (Eigen::Index k = 1; k < e.values.size(); ++k) REQUIRE(e.values(k - 1) <= e.values(k));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("eig_symmetric signs and oracle agreement") {
  Rng rng = make_stream(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd s = random_symmetric(8, rng);
    const EigenDecomposition e = eig_symmetric(s);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(s);
    CHECK(max_abs(e.values - oracle.eigenvalues()) <= 1e-10 * max_abs(s));
    for (int k = 0; k < 8; ++k) {
      Eigen::Index arg = 0;
      e.vectors.col(k).cwiseAbs().maxCoeff(&arg);
      CHECK(e.vectors(arg, k) > 0.0);
    }
  }
}

TEST_CASE("gft") {
  CHECK(gft(wrap(Eigen::Matrix2d::Identity()), Eigen::Vector2d(3, 1)) == Eigen::Vector2d(3, 1));
  const Eigen::MatrixXd v = spectemp::testing::p3_adjacency_eigenvectors();
  const Eigen::VectorXd xh = gft(wrap(v), v.col(1));
  CHECK(max_abs(xh - Eigen::Vector3d(0, 1, 0)) <= 1e-15);
  CHECK_THROWS_AS(gft(wrap(v), Eigen::Vector2d(1, 1)), DimensionMismatch);
}

TEST_CASE("freq_response examples") {
  const Eigen::Vector3d lam(-kSqrt2, 0, kSqrt2);
  CHECK(freq_response(Eigen::VectorXd::Ones(1), lam) == Eigen::Vector3d::Ones());
  CHECK(freq_response(Eigen::Vector2d(0, 1), lam) == lam);
  CHECK(freq_response(Eigen::Vector3d(1, 0, 1), Eigen::VectorXd::Constant(1, 2.0))(0) == 5.0);
}

TEST_CASE("filtering in the vertex and frequency domains agree") {
  Rng rng = make_stream(13);
  std::uniform_int_distribution<int> taps(1, 5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = erdos_renyi(12, 0.3, rng());
    const Eigen::MatrixXd s = build_shift(g, ShiftKind::Adjacency).matrix() / 3.0;
    Eigen::VectorXd h(taps(rng)), x(12);
    for (auto& c : h) c = gauss(rng);
    for (auto& c : x) c = gauss(rng);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(12), p = x;
    for (Eigen::Index l = 0; l < h.size(); ++l) {
      y += h(l) * p;
      p = s * p;
    }
    const EigenDecomposition e = eig_symmetric(s);
    const Eigen::VectorXd yf = e.vectors * freq_response(h, e.values).asDiagonal() * e.vectors.transpose() * x;
    CHECK((y - yf).norm() <= 1e-8);
  }
}

TEST_CASE("W of the path P3") {
  Eigen::Matrix3d expect;
  expect << 0.25, 0.5, 0.25, 0.5, 0, 0.5, 0.25, 0.5, 0.25;
  const Eigen::MatrixXd w = build_w(wrap(spectemp::testing::p3_adjacency_eigenvectors()), ShiftKind::Adjacency);
  CHECK(max_abs(w - expect) <= 1e-15);
  CHECK(build_w(wrap(Eigen::Matrix3d::Identity()), ShiftKind::Adjacency) == Eigen::Matrix3d::Identity());
}

TEST_CASE("build_w needs degrees for the combinatorial Laplacian") {
  const SpectralTemplates t = templates_from_shift(build_shift(path_graph(3), ShiftKind::CombinatorialLaplacian));
  CHECK_THROWS_AS(build_w(t, ShiftKind::CombinatorialLaplacian), MissingInputError);
  const Eigen::MatrixXd w = build_w(t, ShiftKind::CombinatorialLaplacian, Eigen::Vector3d(1, 2, 1));
  CHECK(w.col(0) == Eigen::Vector3d(1, 2, 1));
}

TEST_CASE("nullspace_dim examples") {
  CHECK(nullspace_dim(build_w(wrap(spectemp::testing::p3_adjacency_eigenvectors()), ShiftKind::Adjacency)) == 1);
  CHECK(nullspace_dim(Eigen::Matrix4d::Identity()) == 0);
  const Eigen::Vector4d u(1, -2, 0.5, 3);
  CHECK(nullspace_dim(u * u.transpose()) == 3);
  CHECK_THROWS_AS(nullspace_dim(Eigen::Matrix3d::Zero()), DegenerateMatrixError);
}

TEST_CASE("nullspace_basis is orthonormal and annihilated") {
  Rng rng = make_stream(14);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(6, 3), b(3, 9);
    for (auto& x : a.reshaped()) x = gauss(rng);
    for (auto& x : b.reshaped()) x = gauss(rng);
    const Eigen::MatrixXd m = a * b;  // rank 3, nullity 6
    const Eigen::MatrixXd z = nullspace_basis(m);
    REQUIRE(z.cols() == 6);
    CHECK(nullspace_dim(m) == 6);
    CHECK(max_abs(z.transpose() * z - Eigen::MatrixXd::Identity(6, 6)) <= 1e-12);
    CHECK(max_abs(m * z) <= 1e-10 * max_abs(m));
  }
}

TEST_CASE("svd_jacobi singular values agree with the Eigen oracle") {
  Rng rng = make_stream(15);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd m(7, 5);
    for (auto& x : m.reshaped()) x = gauss(rng);
    const SingularDecomposition s = svd_jacobi(m);
    const Eigen::JacobiSVD<Eigen::MatrixXd> oracle(m);
    CHECK(max_abs(s.values - oracle.singularValues()) <= 1e-12 * oracle.singularValues()(0));
  }
}

TEST_CASE("degree eigenvector of the normalized Laplacian of P3") {
  const SpectralTemplates t = templates_from_shift(build_shift(path_graph(3), ShiftKind::NormalizedLaplacian));
  const int k = find_degree_eigenvector(t);
  const Eigen::Vector3d expect = Eigen::Vector3d(1, kSqrt2, 1) / 2;
  CHECK(std::abs(t.v.col(k).dot(expect)) == doctest::Approx(1.0));

  const std::vector<int> order = laplacian_column_order(t);
  CHECK(order.front() == k);
  CHECK(order.size() == 3);
}

TEST_CASE("degree eigenvector on hand-made templates") {
  Eigen::Matrix2d v;
  v << 1, 1, 1, -1;
  v /= kSqrt2;
  CHECK(find_degree_eigenvector(wrap(v)) == 0);

  Eigen::Matrix3d two;
  two << 1, 1, 0, 1, 1, 1, 1, 1, -1;
  CHECK_THROWS_AS(find_degree_eigenvector(wrap(two)), AmbiguityError);
  Eigen::Matrix2d none;
  none << 1, 1, -1, -1;
  CHECK_THROWS_AS(find_degree_eigenvector(wrap(none)), AmbiguityError);
}

TEST_CASE("templates_from_operator") {
  const SpectralTemplates id = templates_from_operator(Eigen::Matrix3d::Identity());
  CHECK(id.degenerate_spectrum);
  CHECK(id.source == TemplateSource::OperatorEigenbasis);
  CHECK(max_abs(id.v.transpose() * id.v - Eigen::Matrix3d::Identity()) <= 1e-15);

  const Eigen::MatrixXd a = build_shift(path_graph(3), ShiftKind::Adjacency).matrix();
  const SpectralTemplates ta = templates_from_operator(a);
  CHECK_FALSE(ta.degenerate_spectrum);
  CHECK(max_abs(ta.v - eig_symmetric(a).vectors) == 0.0);

  const SpectralTemplates tb = templates_from_operator(2 * a + 3 * Eigen::Matrix3d::Identity());
  for (int k = 0; k < 3; ++k) CHECK(std::abs(tb.v.col(k).dot(ta.v.col(k))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("W annihilates the true eigenvalues") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Graph g = *connected_erdos_renyi(15, 0.3, s);
    {
      const ShiftMatrix a = build_shift(g, ShiftKind::Adjacency);
      const EigenDecomposition e = eig_symmetric(a.matrix());
      const Eigen::MatrixXd w = build_w(wrap(e.vectors), ShiftKind::Adjacency);
      CHECK((w * e.values).cwiseAbs().maxCoeff() <= 1e-9);
    }
    {
      const ShiftMatrix l = build_shift(g, ShiftKind::NormalizedLaplacian);
      const SpectralTemplates t = templates_from_shift(l);
      const Eigen::VectorXd lam = (t.v.transpose() * l.matrix() * t.v).diagonal();
      Eigen::VectorXd ordered(lam.size());
      const std::vector<int> order = laplacian_column_order(t);
      for (std::size_t k = 0; k < order.size(); ++k) ordered(static_cast<Eigen::Index>(k)) = lam(order[k]);
      // With lambda_1 = 0 the unit diagonal reads sum_k lambda_k v_k(i)^2 = 1,
      // so [-1, lambda_2, ..., lambda_N] is a null vector of W-tilde.
      CHECK(std::abs(ordered(0)) <= 1e-9);
      ordered(0) = -1.0;
      const Eigen::MatrixXd w = build_w(t, ShiftKind::NormalizedLaplacian);
      CHECK((w * ordered).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("sign flips leave W, Q and the degree column unchanged") {
  Rng rng = make_stream(16);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Graph g = *connected_erdos_renyi(10, 0.3, s);
    const SpectralTemplates ta = templates_from_shift(build_shift(g, ShiftKind::Adjacency));
    const SpectralTemplates fa = wrap(regauge(ta.v, rng, false));
    CHECK(build_w(ta, ShiftKind::Adjacency) == build_w(fa, ShiftKind::Adjacency));
    CHECK(nullspace_dim(build_w(ta, ShiftKind::Adjacency)) == nullspace_dim(build_w(fa, ShiftKind::Adjacency)));

    const SpectralTemplates tl = templates_from_shift(build_shift(g, ShiftKind::NormalizedLaplacian));
    const SpectralTemplates fl = wrap(regauge(tl.v, rng, false));
    CHECK(find_degree_eigenvector(tl) == find_degree_eigenvector(fl));
    CHECK(build_w(tl, ShiftKind::NormalizedLaplacian) == build_w(fl, ShiftKind::NormalizedLaplacian));
  }
}

TEST_CASE("degenerate spectrum detection") {
  CHECK(has_degenerate_spectrum(Eigen::Vector3d(0, 1, 1 + 1e-9), 1.0));
  CHECK_FALSE(has_degenerate_spectrum(Eigen::Vector3d(0, 1, 2), 1.0));
  CHECK(templates_from_shift(build_shift(complete_graph(3), ShiftKind::Adjacency)).degenerate_spectrum);
}
