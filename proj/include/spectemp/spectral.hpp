#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spectemp/graph.hpp"

namespace spectemp {

enum class TemplateSource { Exact, SampleCovariance, OperatorEigenbasis };

std::string_view to_string(TemplateSource source);

// Eigenvector matrix of an (unknown) shift; column k is v_k. Columns carry a
// free sign gauge, and for estimated sources they carry noise of order
// `epsilon`.
struct SpectralTemplates {
  Eigen::MatrixXd v;
  bool noisy = false;
  double epsilon = 0.0;
  TemplateSource source = TemplateSource::Exact;
  // Set when two eigenvalues of the source operator are closer than
  // kDegenerateGap (relative). The basis inside such an eigenspace is
  // arbitrary.
  bool degenerate_spectrum = false;

  int size() const { return static_cast<int>(v.rows()); }
};

// Ascending eigenvalues with matching orthonormal eigenvectors.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  int sweeps = 0;
};

inline constexpr double kDegenerateGap = 1e-6;

// Cyclic Jacobi eigensolver. Stops when the off-diagonal Frobenius norm falls
// below 1e-12 * ||m||_F (at most 100 sweeps). Each eigenvector is signed so
// that its largest-magnitude entry is positive, ties going to the lowest index.
EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m);

// Singular values (descending) and right singular vectors, by one-sided
// Jacobi rotations: the rotations diagonalize m^T m without forming it.
struct SingularDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd right_vectors;
};

SingularDecomposition svd_jacobi(const Eigen::MatrixXd& m);

bool has_degenerate_spectrum(const Eigen::VectorXd& ascending_values, double scale);

// Templates of a known shift (source = Exact).
SpectralTemplates templates_from_shift(const ShiftMatrix& s);

// Templates from the eigenbasis of an arbitrary symmetric operator B.
SpectralTemplates templates_from_operator(const Eigen::MatrixXd& b);

// Graph Fourier transform V^T x.
Eigen::VectorXd gft(const SpectralTemplates& templates, const Eigen::VectorXd& x);

// h-hat_k = sum_l h_l * values_k^l.
Eigen::VectorXd freq_response(const Eigen::VectorXd& h, const Eigen::VectorXd& values);

// Index of the unique column whose entries (ignoring |x| <= 1e-9) all share
// one strict sign. Throws AmbiguityError when zero or several qualify.
int find_degree_eigenvector(const SpectralTemplates& templates);

// Column order used by the Laplacian modes: the same-sign column first, the
// remaining columns in their original order.
std::vector<int> laplacian_column_order(const SpectralTemplates& templates);

// W = V (.) V for Adjacency. For the Laplacian modes the same-sign column is
// moved to the front and replaced: by the all-ones vector (normalized
// Laplacian) or by sqrt(d), so that the squared column equals d
// (combinatorial Laplacian, where d is required).
Eigen::MatrixXd build_w(const SpectralTemplates& templates, ShiftKind mode,
                        const std::optional<Eigen::VectorXd>& d = std::nullopt);

inline double default_rank_tol(Eigen::Index n) { return 1e-8 * static_cast<double>(n); }

// Number of singular values below tol_rel * sigma_max. tol_rel <= 0 selects
// default_rank_tol(cols).
int nullspace_dim(const Eigen::MatrixXd& m, double tol_rel = 0.0);

// Orthonormal basis (columns) of the numerical right nullspace at the same
// tolerance as nullspace_dim.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double tol_rel = 0.0);

}  // namespace spectemp
