#ifndef MILBOOST_LP_HPP
#define MILBOOST_LP_HPP

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace mil {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Feasibility tolerance applied to every LP in the library.
inline constexpr double kLpFeasibilityTol = 1e-7;
/// Duality-gap tolerance applied to every LP in the library.
inline constexpr double kLpGapTol = 1e-6;

enum class Relation { LessEqual, Equal, GreaterEqual };

/// minimize cost^T x  s.t.  rows[i]^T x (rel_i) rhs_i,  lower <= x <= upper.
class LinearProgram {
 public:
  explicit LinearProgram(Eigen::Index num_vars);

  Eigen::Index num_vars() const { return cost_.size(); }
  Eigen::Index num_constraints() const { return static_cast<Eigen::Index>(rhs_.size()); }

  void set_cost(const Eigen::Ref<const Eigen::VectorXd>& cost);
  void set_cost(Eigen::Index j, double c) { cost_[j] = c; }
  void set_bounds(Eigen::Index j, double lo, double hi);
  /// Returns the index of the new constraint.
  Eigen::Index add_constraint(const Eigen::Ref<const Eigen::VectorXd>& coeffs, Relation rel, double rhs);

  const Eigen::VectorXd& cost() const { return cost_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const std::vector<Eigen::VectorXd>& rows() const { return rows_; }
  const std::vector<Relation>& relations() const { return rel_; }
  const std::vector<double>& rhs() const { return rhs_; }

  /// Constraint matrix (num_constraints x num_vars).
  Eigen::MatrixXd matrix() const;

 private:
  Eigen::VectorXd cost_, lower_, upper_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<Relation> rel_;
  std::vector<double> rhs_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus status);

/// Result of an LP solve.
///
/// Dual multipliers follow the Lagrangian
///   L(x, y) = c^T x + sum_i s_i y_i (a_i^T x - b_i),
/// with s_i = +1 for <= and = rows, s_i = -1 for >= rows, so inequality
/// multipliers are nonnegative at optimality.
struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  Eigen::VectorXd x;
  Eigen::VectorXd duals;
  double objective = 0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Optimality certificate computed from an LP and a candidate solution,
/// independently of how the solution was produced.
struct LpCertificate {
  double primal_infeasibility = 0;  // max violation of rows and bounds
  double dual_infeasibility = 0;    // sign violations of multipliers and reduced costs
  double complementary_slackness = 0;
  double primal_objective = 0;
  double dual_objective = 0;
  double duality_gap = 0;  // |primal - dual|
};

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol);

/// Pluggable solver backend, so an external LP code can replace the
/// built-in simplex.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpSolution solve(const LinearProgram& lp) const = 0;
  virtual std::string name() const = 0;
};

/// Dense two-phase tableau simplex. Most-negative pricing, falling back to
/// Bland's rule after a run of degenerate pivots so it cannot cycle. Final
/// primal and dual values are recomputed from the optimal basis by an LU solve.
class DenseSimplex final : public LpBackend {
 public:
  struct Options {
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-9;
    int max_iterations = 200000;
  };

  DenseSimplex() = default;
  explicit DenseSimplex(Options opts) : opts_(opts) {}

  LpSolution solve(const LinearProgram& lp) const override;
  std::string name() const override { return "dense-simplex-bland"; }

 private:
  Options opts_;
};

/// Solves with the given backend (built-in simplex when null). A solution
/// reported optimal whose certificate fails the library tolerances is
/// downgraded to NumericalFailure.
LpSolution solve_lp(const LinearProgram& lp, const LpBackend* backend = nullptr);

/// Optimum of the boosting dual restricted to finitely many hypotheses:
///
///   min gamma  s.t.  sum_i u_ij d_i <= gamma  (every column j),
///                    sum_i d_i = 1,  0 <= d_i <= 1 / (nu m).
///
/// `w` holds the multipliers of the column constraints; they are the
/// ensemble weights (nonnegative, summing to one).
struct MasterSolution {
  double gamma = 0;
  Eigen::VectorXd d;
  Eigen::VectorXd w;
  LpCertificate certificate;
  int iterations = 0;
};

/// `margins` is m x t with entries y_i * h_j(B_i). Throws ValidationError
/// for nu outside (0, 1] or empty input, NumericalError if the LP fails.
MasterSolution solve_restricted_master(const Eigen::MatrixXd& margins, double nu,
                                       const LpBackend* backend = nullptr);

/// Upper bound 1 / (nu m) on each boosting weight.
inline double capped_simplex_bound(double nu, Eigen::Index m) { return 1.0 / (nu * static_cast<double>(m)); }

}  // namespace mil

#endif  // MILBOOST_LP_HPP
