#pragma once

#include <iosfwd>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace spectemp {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize c^T x  s.t.  a_eq x = b_eq,  a_in x <= b_in,  lower <= x <= upper.
struct LinearProgram {
  Eigen::VectorXd c;
  SparseRowMatrix a_eq;
  Eigen::VectorXd b_eq;
  SparseRowMatrix a_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_vars() const { return static_cast<int>(c.size()); }

  // Throws DimensionMismatch / ParameterError on malformed programs.
  void validate() const;
};

// Incremental construction of a LinearProgram from sparse rows.
class LpBuilder {
 public:
  using Row = std::vector<std::pair<int, double>>;

  int add_variable(double cost, double lower = -kInf, double upper = kInf);
  void set_cost(int var, double cost);
  void add_le(const Row& row, double rhs);
  void add_ge(const Row& row, double rhs);
  void add_eq(const Row& row, double rhs);

  int num_vars() const { return static_cast<int>(cost_.size()); }
  LinearProgram build() const;

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<Eigen::Triplet<double>> eq_, in_;
  std::vector<double> b_eq_, b_in_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string_view to_string(LpStatus status);

struct LpResiduals {
  double primal = 0.0;  // max violation of equalities, inequalities and bounds
  double dual = 0.0;    // ||A^T y + G^T z + c||_inf at the returned multipliers
  double gap = 0.0;     // |primal objective - dual objective|
  // Infeasible: Farkas multipliers (equality block, then inequality block,
  // then lower-bound and upper-bound blocks) with b^T y + h^T z = -1.
  // Unbounded: a recession direction d with c^T d = -1.
  Eigen::VectorXd certificate;
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double dual_objective = 0.0;  // lower bound on the optimum (weak duality)
  Eigen::VectorXd y_eq;         // multipliers of a_eq
  Eigen::VectorXd z_in;         // multipliers of a_in (>= 0)
  int iterations = 0;
  LpResiduals residuals;
};

struct LpOptions {
  int max_iterations = 200;
  double tolerance = 1e-9;
  // When set, the program is written here in the text format of write_lp_text
  // before solving.
  std::ostream* dump = nullptr;
};

// Homogeneous self-dual primal-dual interior-point method with Mehrotra
// predictor-corrector steps. Free variables are kept as they are (the method
// works on the inequality form), bounds become inequality rows. On
// degenerate optimal faces it returns a point close to the analytic centre.
LpSolution lp_solve(const LinearProgram& prob, const LpOptions& options = {});

// Plain-text dump, one record per line, whitespace separated, fixed width:
//   LP   <nvars> <n_eq> <n_in>
//   C    <j> <c_j>
//   BND  <j> <lower> <upper>
//   EQ   <i> <j> <a_ij>        (nonzeros of a_eq)
//   BEQ  <i> <b_i>
//   IN   <i> <j> <a_ij>        (nonzeros of a_in)
//   BIN  <i> <b_i>
// Numbers use 17 significant digits; infinite bounds print as inf / -inf.
void write_lp_text(std::ostream& out, const LinearProgram& prob);

}  // namespace spectemp
