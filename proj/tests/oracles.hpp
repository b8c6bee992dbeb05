// Test-only reference computations. Nothing here calls into the library's
// solvers; each oracle is brute force over a small search space.
#ifndef MILBOOST_TESTS_ORACLES_HPP
#define MILBOOST_TESTS_ORACLES_HPP

#include "milboost/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

/// Minimum of an LP whose variables all have finite bounds, by enumerating
/// every vertex (n active faces out of rows + bound faces). Returns nullopt
/// when no feasible vertex exists.
inline std::optional<double> lp_min_by_vertices(const mil::LinearProgram& lp, double tol = 1e-9) {
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_constraints();
  std::vector<Eigen::VectorXd> face_a;
  std::vector<double> face_b;
  for (Eigen::Index i = 0; i < m; ++i) {
    face_a.push_back(lp.rows()[static_cast<std::size_t>(i)]);
    face_b.push_back(lp.rhs()[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
    face_a.push_back(e);
    face_b.push_back(lp.lower()[j]);
    face_a.push_back(e);
    face_b.push_back(lp.upper()[j]);
  }
  const auto faces = static_cast<Eigen::Index>(face_a.size());
  std::optional<double> best;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
  std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start, Eigen::Index depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        a.row(k) = face_a[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])].transpose();
        b[k] = face_b[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      Eigen::VectorXd x = lu.solve(b);
      for (Eigen::Index j = 0; j < n; ++j)
        if (x[j] < lp.lower()[j] - tol || x[j] > lp.upper()[j] + tol) return;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double ax = lp.rows()[static_cast<std::size_t>(i)].dot(x);
        const double rhs = lp.rhs()[static_cast<std::size_t>(i)];
        switch (lp.relations()[static_cast<std::size_t>(i)]) {
          case mil::Relation::LessEqual:
            if (ax > rhs + tol) return;
            break;
          case mil::Relation::GreaterEqual:
            if (ax < rhs - tol) return;
            break;
          case mil::Relation::Equal:
            if (std::abs(ax - rhs) > tol) return;
            break;
        }
      }
      const double obj = lp.cost().dot(x);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (Eigen::Index f = start; f < faces; ++f) {
      pick[static_cast<std::size_t>(depth)] = f;
      rec(f + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Calls f on every point of the grid {-1, -1+step, ..., 1}^dim that lies
/// in the L1 ball (or L2 ball when `l2` is set).
inline void for_each_ball_grid_point(Eigen::Index dim, double step, bool l2,
                                     const std::function<void(const Eigen::VectorXd&)>& f) {
  const int per_axis = static_cast<int>(std::lround(2.0 / step)) + 1;
  Eigen::VectorXd x(dim);
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::function<void(Eigen::Index, double)> rec = [&](Eigen::Index k, double used) {
    if (k == dim) {
      f(x);
      return;
    }
    for (int i = 0; i < per_axis; ++i) {
      const double v = -1.0 + step * i;
      const double add = l2 ? v * v : std::abs(v);
      if (used + add > 1.0 + 1e-12) continue;
      x[k] = v;
      rec(k + 1, used + add);
    }
  };
  rec(0, 0.0);
}

/// Tiny MIL problem with kernel values computed directly (no library calls):
/// rows of `k` are instances of all bags stacked, columns are pool entries.
struct TinyProblem {
  Eigen::MatrixXd k;                 // instances x pool
  std::vector<int> bag_of;           // instance -> bag
  std::vector<int> labels;           // per bag
  Eigen::VectorXd d;                 // per bag
};

/// Edge of an arbitrary score vector (one score per stacked instance).
inline double edge_of_scores(const TinyProblem& pr, const Eigen::VectorXd& scores) {
  const auto m = static_cast<int>(pr.labels.size());
  std::vector<double> best(static_cast<std::size_t>(m), -std::numeric_limits<double>::infinity());
  for (Eigen::Index r = 0; r < scores.size(); ++r) {
    auto& b = best[static_cast<std::size_t>(pr.bag_of[static_cast<std::size_t>(r)])];
    b = std::max(b, scores[r]);
  }
  double e = 0;
  for (int i = 0; i < m; ++i) e += pr.d[i] * pr.labels[static_cast<std::size_t>(i)] * best[static_cast<std::size_t>(i)];
  return e;
}

/// Maximum edge over the lattice {step * integer}^p intersected with the
/// L1 unit ball, by exhaustive enumeration with incremental scores.
inline double best_edge_l1_grid(const TinyProblem& pr, double step) {
  const Eigen::Index p = pr.k.cols();
  const int units = static_cast<int>(std::lround(1.0 / step));
  std::vector<Eigen::VectorXd> partial(static_cast<std::size_t>(p + 1), Eigen::VectorXd::Zero(pr.k.rows()));
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index c, int left) {
    if (c == p) {
      best = std::max(best, edge_of_scores(pr, partial[static_cast<std::size_t>(p)]));
      return;
    }
    for (int j = -left; j <= left; ++j) {
      partial[static_cast<std::size_t>(c + 1)] = partial[static_cast<std::size_t>(c)] + (j * step) * pr.k.col(c);
      rec(c + 1, left - std::abs(j));
    }
  };
  rec(0, units);
  return best;
}

/// Minimum of a 2-d function over {a : a^T Q a <= 1} by a polar grid in
/// Cholesky coordinates (a = L^{-T} rho (cos t, sin t)) followed by
/// repeated local zooming.
inline double min_over_ellipse_2d(const Eigen::Matrix2d& q, const std::function<double(const Eigen::Vector2d&)>& f,
                                  Eigen::Vector2d* argmin = nullptr) {
  const Eigen::Matrix2d l = q.llt().matrixL();
  const Eigen::Matrix2d back = l.transpose().inverse();
  auto at = [&](double rho, double th) { return Eigen::Vector2d(back * Eigen::Vector2d(rho * std::cos(th), rho * std::sin(th))); };
  const double two_pi = 2.0 * std::acos(-1.0);
  double best = std::numeric_limits<double>::infinity(), best_rho = 0, best_th = 0;
  auto visit = [&](double rho, double th) {
    rho = std::clamp(rho, 0.0, 1.0);
    const double v = f(at(rho, th));
    if (v < best) {
      best = v;
      best_rho = rho;
      best_th = th;
    }
  };
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j < 2000; ++j) visit(i / 400.0, two_pi * j / 2000.0);
  double hr = 1.0 / 400, ht = two_pi / 2000;
  for (int level = 0; level < 6; ++level) {
    const double cr = best_rho, ct = best_th;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) visit(cr + i * hr / 4, ct + j * ht / 4);
    hr /= 4;
    ht /= 4;
  }
  if (argmin) *argmin = at(best_rho, best_th);
  return best;
}

}  // namespace oracle

#endif  // MILBOOST_TESTS_ORACLES_HPP
