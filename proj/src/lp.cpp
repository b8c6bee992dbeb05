#include "milboost/lp.hpp"

#include "milboost/error.hpp"

#include <algorithm>
#include <cmath>

namespace mil {

LinearProgram::LinearProgram(Eigen::Index num_vars)
    : cost_(Eigen::VectorXd::Zero(num_vars)),
      lower_(Eigen::VectorXd::Zero(num_vars)),
      upper_(Eigen::VectorXd::Constant(num_vars, kInf)) {
  if (num_vars < 1) throw ValidationError("LinearProgram: need at least one variable");
}

void LinearProgram::set_cost(const Eigen::Ref<const Eigen::VectorXd>& cost) {
  if (cost.size() != num_vars()) throw ValidationError("LinearProgram::set_cost: size mismatch");
  cost_ = cost;
}

void LinearProgram::set_bounds(Eigen::Index j, double lo, double hi) {
  if (j < 0 || j >= num_vars()) throw ValidationError("LinearProgram::set_bounds: index out of range");
  if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == kInf || hi == -kInf)
    throw ValidationError("LinearProgram::set_bounds: invalid bounds");
  lower_[j] = lo;
  upper_[j] = hi;
}

Eigen::Index LinearProgram::add_constraint(const Eigen::Ref<const Eigen::VectorXd>& coeffs, Relation rel,
                                           double rhs) {
  if (coeffs.size() != num_vars())
    throw ValidationError("LinearProgram::add_constraint: expected " + std::to_string(num_vars()) +
                          " coefficients, got " + std::to_string(coeffs.size()));
  if (!std::isfinite(rhs) || !coeffs.allFinite())
    throw ValidationError("LinearProgram::add_constraint: non-finite data");
  rows_.emplace_back(coeffs);
  rel_.push_back(rel);
  rhs_.push_back(rhs);
  return num_constraints() - 1;
}

Eigen::MatrixXd LinearProgram::matrix() const {
  Eigen::MatrixXd a(num_constraints(), num_vars());
  for (Eigen::Index i = 0; i < num_constraints(); ++i) a.row(i) = rows_[static_cast<std::size_t>(i)].transpose();
  return a;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::NumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

double row_sign(Relation rel) { return rel == Relation::GreaterEqual ? -1.0 : 1.0; }

// How an original variable maps onto nonnegative standard-form variables.
struct VarMap {
  enum class Kind { Shifted, Reflected, Split } kind;
  Eigen::Index col;   // x = lo + v[col], x = hi - v[col], or v[col] - v[col + 1]
  double offset;
};

struct StandardForm {
  Eigen::MatrixXd a;  // rows x std vars, rows already sign-normalized so b >= 0
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<Relation> rel;
  std::vector<double> flip;  // +1 / -1 applied to the row
  std::vector<VarMap> vars;
  Eigen::Index original_rows = 0;
  double cost_offset = 0;
};

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm sf;
  const Eigen::Index n = lp.num_vars();
  Eigen::Index nv = 0;
  std::vector<Eigen::Index> bound_rows;  // original vars needing v <= hi - lo
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lp.lower()[j], hi = lp.upper()[j];
    if (std::isfinite(lo)) {
      sf.vars.push_back({VarMap::Kind::Shifted, nv++, lo});
      if (std::isfinite(hi)) bound_rows.push_back(j);
    } else if (std::isfinite(hi)) {
      sf.vars.push_back({VarMap::Kind::Reflected, nv++, hi});
    } else {
      sf.vars.push_back({VarMap::Kind::Split, nv, 0.0});
      nv += 2;
    }
  }

  // x = offset + T v
  auto transform_row = [&](const Eigen::VectorXd& coeffs, Eigen::VectorXd& out, double& shift) {
    out.setZero(nv);
    shift = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = coeffs[j];
      if (a == 0) continue;
      const auto& vm = sf.vars[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Kind::Shifted:
          out[vm.col] += a;
          shift += a * vm.offset;
          break;
        case VarMap::Kind::Reflected:
          out[vm.col] -= a;
          shift += a * vm.offset;
          break;
        case VarMap::Kind::Split:
          out[vm.col] += a;
          out[vm.col + 1] -= a;
          break;
      }
    }
  };

  const Eigen::Index m = lp.num_constraints() + static_cast<Eigen::Index>(bound_rows.size());
  sf.a.setZero(m, nv);
  sf.b.setZero(m);
  sf.original_rows = lp.num_constraints();
  Eigen::VectorXd row;
  double shift = 0;
  for (Eigen::Index i = 0; i < lp.num_constraints(); ++i) {
    transform_row(lp.rows()[static_cast<std::size_t>(i)], row, shift);
    sf.a.row(i) = row.transpose();
    sf.b[i] = lp.rhs()[static_cast<std::size_t>(i)] - shift;
    sf.rel.push_back(lp.relations()[static_cast<std::size_t>(i)]);
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const auto j = bound_rows[k];
    const auto i = lp.num_constraints() + static_cast<Eigen::Index>(k);
    sf.a(i, sf.vars[static_cast<std::size_t>(j)].col) = 1.0;
    sf.b[i] = lp.upper()[j] - lp.lower()[j];
    sf.rel.push_back(Relation::LessEqual);
  }
  sf.flip.assign(static_cast<std::size_t>(m), 1.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (sf.b[i] < 0) {
      sf.a.row(i) *= -1.0;
      sf.b[i] = -sf.b[i];
      sf.flip[static_cast<std::size_t>(i)] = -1.0;
      auto& r = sf.rel[static_cast<std::size_t>(i)];
      if (r == Relation::LessEqual)
        r = Relation::GreaterEqual;
      else if (r == Relation::GreaterEqual)
        r = Relation::LessEqual;
    }
  }

  transform_row(lp.cost(), sf.c, sf.cost_offset);
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const DenseSimplex::Options& opts) : sf_(sf), opts_(opts) {
    m_ = sf.a.rows();
    nv_ = sf.a.cols();
    Eigen::Index slacks = 0, arts = 0;
    for (auto r : sf.rel) {
      if (r != Relation::Equal) ++slacks;
      if (r != Relation::LessEqual) ++arts;
    }
    art_begin_ = nv_ + slacks;
    ncols_ = art_begin_ + arts;
    t_.setZero(m_ + 1, ncols_ + 1);
    t_.topLeftCorner(m_, nv_) = sf.a;
    t_.col(ncols_).head(m_) = sf.b;
    basis_.resize(static_cast<std::size_t>(m_));
    identity_col_.resize(static_cast<std::size_t>(m_));
    Eigen::Index s = nv_, a = art_begin_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto r = sf.rel[static_cast<std::size_t>(i)];
      if (r == Relation::LessEqual) {
        t_(i, s) = 1.0;
        basis_[static_cast<std::size_t>(i)] = s;
        identity_col_[static_cast<std::size_t>(i)] = s;
        ++s;
      } else {
        if (r == Relation::GreaterEqual) t_(i, s++) = -1.0;
        t_(i, a) = 1.0;
        basis_[static_cast<std::size_t>(i)] = a;
        identity_col_[static_cast<std::size_t>(i)] = a;
        ++a;
      }
    }
  }

  // Returns false when the pivot budget is exhausted; sets unbounded_ when
  // an improving direction has no blocking row.
  // Entering column: most negative reduced cost, switching to Bland's
  // lowest-index rule after a streak of degenerate pivots so cycling cannot
  // occur.
  bool run(Eigen::Index allowed_cols) {
    int degenerate = 0;
    for (;;) {
      Eigen::Index enter = -1;
      if (degenerate < kBlandAfter) {
        double most = -opts_.optimality_tol;
        for (Eigen::Index j = 0; j < allowed_cols; ++j) {
          if (t_(m_, j) < most) {
            most = t_(m_, j);
            enter = j;
          }
        }
      } else {
        for (Eigen::Index j = 0; j < allowed_cols; ++j) {
          if (t_(m_, j) < -opts_.optimality_tol) {
            enter = j;
            break;
          }
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double aij = t_(i, enter);
        if (aij <= opts_.pivot_tol) continue;
        const double ratio = t_(i, ncols_) / aij;
        const double tie = 1e-12 * (1.0 + std::abs(best));
        if (leave < 0 || ratio < best - tie) {
          leave = i;
          best = ratio;
        } else if (ratio <= best + tie &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = i;
          best = std::min(best, ratio);
        }
      }
      if (leave < 0) {
        unbounded_ = true;
        return true;
      }
      if (++iterations_ > opts_.max_iterations) return false;
      degenerate = best <= opts_.pivot_tol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    Eigen::VectorXd col = t_.col(c);
    col[r] = 0.0;
    t_.noalias() -= col * t_.row(r);
    t_.col(c).setZero();
    t_(r, c) = 1.0;
    basis_[static_cast<std::size_t>(r)] = c;
  }

  void set_objective(const Eigen::VectorXd& full_cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(ncols_) = full_cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = full_cost[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  // Pivots zero-level artificials out of the basis where possible.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
      for (Eigen::Index j = 0; j < art_begin_; ++j) {
        if (std::abs(t_(i, j)) > opts_.pivot_tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -t_(m_, ncols_); }
  Eigen::Index art_begin() const { return art_begin_; }
  Eigen::Index ncols() const { return ncols_; }
  Eigen::Index rows() const { return m_; }
  bool unbounded() const { return unbounded_; }
  int iterations() const { return iterations_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const std::vector<Eigen::Index>& identity_cols() const { return identity_col_; }
  const Eigen::MatrixXd& data() const { return t_; }

  // Full standard-form column j (structural, slack or artificial).
  Eigen::VectorXd original_column(Eigen::Index j) const {
    if (j < nv_) return sf_.a.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    Eigen::Index s = nv_, a = art_begin_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto r = sf_.rel[static_cast<std::size_t>(i)];
      if (r != Relation::Equal) {
        if (s == j) {
          e[i] = (r == Relation::LessEqual) ? 1.0 : -1.0;
          return e;
        }
        ++s;
      }
      if (r != Relation::LessEqual) {
        if (a == j) {
          e[i] = 1.0;
          return e;
        }
        ++a;
      }
    }
    return e;
  }

 private:
  static constexpr int kBlandAfter = 50;

  const StandardForm& sf_;
  DenseSimplex::Options opts_;
  Eigen::Index m_ = 0, nv_ = 0, art_begin_ = 0, ncols_ = 0;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> identity_col_;
  bool unbounded_ = false;
  int iterations_ = 0;
};

// Maps standard-form primal/dual values back onto the original LP.
void recover(const LinearProgram& lp, const StandardForm& sf, const Eigen::VectorXd& v, const Eigen::VectorXd& ys,
             LpSolution& sol) {
  const Eigen::Index n = lp.num_vars();
  sol.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& vm = sf.vars[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case VarMap::Kind::Shifted:
        sol.x[j] = vm.offset + v[vm.col];
        break;
      case VarMap::Kind::Reflected:
        sol.x[j] = vm.offset - v[vm.col];
        break;
      case VarMap::Kind::Split:
        sol.x[j] = v[vm.col] - v[vm.col + 1];
        break;
    }
  }
  sol.duals.resize(lp.num_constraints());
  for (Eigen::Index i = 0; i < lp.num_constraints(); ++i) {
    const double dobj_db = sf.flip[static_cast<std::size_t>(i)] * ys[i];
    sol.duals[i] = -row_sign(lp.relations()[static_cast<std::size_t>(i)]) * dobj_db;
  }
  sol.objective = lp.cost().dot(sol.x);
}

bool certificate_ok(const LinearProgram& lp, const LpSolution& sol) {
  const auto cert = certify(lp, sol);
  double bscale = 1.0;
  for (double b : lp.rhs()) bscale = std::max(bscale, std::abs(b));
  const double oscale = 1.0 + std::abs(cert.primal_objective);
  return cert.primal_infeasibility <= kLpFeasibilityTol * bscale &&
         cert.dual_infeasibility <= kLpFeasibilityTol * std::max(1.0, lp.cost().cwiseAbs().maxCoeff()) &&
         cert.duality_gap <= kLpGapTol * oscale;
}

}  // namespace

LpSolution DenseSimplex::solve(const LinearProgram& lp) const {
  const StandardForm sf = to_standard_form(lp);
  Tableau tab(sf, opts_);
  LpSolution sol;

  const Eigen::Index ncols = tab.ncols();
  if (tab.art_begin() < ncols) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
    phase1.tail(ncols - tab.art_begin()).setOnes();
    tab.set_objective(phase1);
    if (!tab.run(ncols)) {
      sol.status = LpStatus::NumericalFailure;
      sol.message = "pivot limit reached in phase 1";
      sol.iterations = tab.iterations();
      return sol;
    }
    const double bscale = 1.0 + sf.b.cwiseAbs().maxCoeff();
    if (tab.objective_value() > kLpFeasibilityTol * bscale) {
      sol.status = LpStatus::Infeasible;
      sol.message = "phase 1 optimum " + std::to_string(tab.objective_value()) + " > 0";
      sol.iterations = tab.iterations();
      return sol;
    }
    tab.expel_artificials();
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(ncols);
  phase2.head(sf.c.size()) = sf.c;
  tab.set_objective(phase2);
  if (!tab.run(tab.art_begin())) {
    sol.status = LpStatus::NumericalFailure;
    sol.message = "pivot limit reached in phase 2";
    sol.iterations = tab.iterations();
    return sol;
  }
  sol.iterations = tab.iterations();
  if (tab.unbounded()) {
    sol.status = LpStatus::Unbounded;
    sol.message = "objective unbounded below";
    return sol;
  }

  const Eigen::Index m = tab.rows();
  const Eigen::Index nvars = sf.a.cols();
  const auto& basis = tab.basis();

  // Read primal/dual values straight from the tableau.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nvars);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto b = basis[static_cast<std::size_t>(i)];
    if (b < nvars) v[b] = std::max(0.0, tab.data()(i, ncols));
  }
  Eigen::VectorXd ys(m);
  for (Eigen::Index i = 0; i < m; ++i) ys[i] = -tab.data()(m, tab.identity_cols()[static_cast<std::size_t>(i)]);
  recover(lp, sf, v, ys, sol);
  sol.status = LpStatus::Optimal;
  if (certificate_ok(lp, sol)) return sol;

  // Refine from the basis by direct factorization.
  if (m > 0) {
    Eigen::MatrixXd bmat(m, m);
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto b = basis[static_cast<std::size_t>(i)];
      bmat.col(i) = tab.original_column(b);
      cb[i] = b < nvars ? sf.c[b] : 0.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(sf.b);
      v.setZero();
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto b = basis[static_cast<std::size_t>(i)];
        if (b < nvars) v[b] = std::max(0.0, xb[i]);
      }
      ys = bmat.transpose().fullPivLu().solve(cb);
      recover(lp, sf, v, ys, sol);
    }
  }
  return sol;
}

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol) {
  LpCertificate c;
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_constraints();
  if (sol.x.size() != n || sol.duals.size() != m)
    throw ValidationError("certify: solution dimensions do not match the LP");
  const Eigen::VectorXd& x = sol.x;
  const Eigen::VectorXd& y = sol.duals;

  Eigen::VectorXd reduced = lp.cost();
  double dual_obj = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = lp.rows()[static_cast<std::size_t>(i)];
    const auto rel = lp.relations()[static_cast<std::size_t>(i)];
    const double b = lp.rhs()[static_cast<std::size_t>(i)];
    const double ax = row.dot(x);
    const double s = row_sign(rel);
    double viol = 0;
    if (rel == Relation::LessEqual) viol = ax - b;
    if (rel == Relation::GreaterEqual) viol = b - ax;
    if (rel == Relation::Equal) viol = std::abs(ax - b);
    c.primal_infeasibility = std::max(c.primal_infeasibility, viol);
    if (rel != Relation::Equal) {
      c.dual_infeasibility = std::max(c.dual_infeasibility, -y[i]);
      c.complementary_slackness = std::max(c.complementary_slackness, std::abs(y[i] * (ax - b)));
    }
    reduced += s * y[i] * row;
    dual_obj -= s * y[i] * b;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lp.lower()[j], hi = lp.upper()[j], r = reduced[j];
    c.primal_infeasibility = std::max({c.primal_infeasibility, lo - x[j], x[j] - hi});
    if (r > 0) {
      if (std::isfinite(lo)) {
        dual_obj += r * lo;
        c.complementary_slackness = std::max(c.complementary_slackness, std::abs(r * (x[j] - lo)));
      } else {
        c.dual_infeasibility = std::max(c.dual_infeasibility, r);
      }
    } else if (r < 0) {
      if (std::isfinite(hi)) {
        dual_obj += r * hi;
        c.complementary_slackness = std::max(c.complementary_slackness, std::abs(r * (hi - x[j])));
      } else {
        c.dual_infeasibility = std::max(c.dual_infeasibility, -r);
      }
    }
  }
  c.primal_objective = lp.cost().dot(x);
  c.dual_objective = dual_obj;
  c.duality_gap = std::abs(c.primal_objective - c.dual_objective);
  return c;
}

LpSolution solve_lp(const LinearProgram& lp, const LpBackend* backend) {
  static const DenseSimplex kDefault;
  const LpBackend& solver = backend ? *backend : static_cast<const LpBackend&>(kDefault);
  LpSolution sol = solver.solve(lp);
  if (sol.optimal() && !certificate_ok(lp, sol)) {
    const auto cert = certify(lp, sol);
    sol.status = LpStatus::NumericalFailure;
    sol.message = "certificate check failed: primal infeasibility " + std::to_string(cert.primal_infeasibility) +
                  ", dual infeasibility " + std::to_string(cert.dual_infeasibility) + ", gap " +
                  std::to_string(cert.duality_gap);
  }
  return sol;
}

}  // namespace mil
