#include "milboost/error.hpp"
#include "milboost/lp.hpp"

namespace mil {

MasterSolution solve_restricted_master(const Eigen::MatrixXd& margins, double nu, const LpBackend* backend) {
  if (!(nu > 0.0 && nu <= 1.0)) throw ValidationError("restricted master: nu must lie in (0, 1]");
  const Eigen::Index m = margins.rows();
  const Eigen::Index t = margins.cols();
  if (m == 0 || t == 0) throw ValidationError("restricted master: empty margin matrix");
  if (!margins.allFinite()) throw ValidationError("restricted master: non-finite margins");

  // Variables: d_0 .. d_{m-1}, gamma.
  LinearProgram lp(m + 1);
  lp.set_cost(m, 1.0);
  const double cap = capped_simplex_bound(nu, m);
  for (Eigen::Index i = 0; i < m; ++i) lp.set_bounds(i, 0.0, cap);
  lp.set_bounds(m, -kInf, kInf);
  Eigen::VectorXd row(m + 1);
  for (Eigen::Index j = 0; j < t; ++j) {
    row.head(m) = margins.col(j);
    row[m] = -1.0;
    lp.add_constraint(row, Relation::LessEqual, 0.0);
  }
  row.head(m).setOnes();
  row[m] = 0.0;
  lp.add_constraint(row, Relation::Equal, 1.0);

  const LpSolution sol = solve_lp(lp, backend);
  if (!sol.optimal())
    throw NumericalError("restricted master LP: " + to_string(sol.status) + " (" + sol.message + ")");

  MasterSolution out;
  out.gamma = sol.x[m];
  out.d = sol.x.head(m).cwiseMax(0.0).cwiseMin(cap);
  out.w = sol.duals.head(t).cwiseMax(0.0);
  out.certificate = certify(lp, sol);
  out.iterations = sol.iterations;
  return out;
}

}  // namespace mil
