#include "milboost/weak_learner.hpp"

#include "milboost/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mil {

std::string to_string(NormKind kind) { return kind == NormKind::L1 ? "l1" : "l2"; }

NormKind norm_kind_from_string(const std::string& name) {
  if (name == "l1" || name == "L1") return NormKind::L1;
  if (name == "l2" || name == "L2") return NormKind::L2Gram;
  throw ValidationError("unknown weak-learner variant '" + name + "' (expected l1 or l2)");
}

bool WeightDist::in_capped_simplex(double nu, double tol) const {
  if (d.size() == 0) return false;
  const double cap = capped_simplex_bound(nu, d.size());
  return d.minCoeff() >= -tol && d.maxCoeff() <= cap + tol && std::abs(d.sum() - 1.0) <= tol;
}

KernelCache::KernelCache(const Sample& sample, InstancePool pool, KernelSpec kernel)
    : pool_(std::move(pool)), kernel_(std::move(kernel)) {
  if (sample.empty()) throw ValidationError("KernelCache: empty sample");
  gram_ = gram_matrix(kernel_, pool_);
  labels_ = sample.labels();
  bag_kernels_.reserve(sample.size());
  for (const auto& lb : sample) {
    if (lb.bag.empty()) throw ValidationError("KernelCache: empty bag");
    bag_kernels_.push_back(cross_kernel(kernel_, lb.bag, pool_));
  }
}

const Eigen::MatrixXd& KernelCache::whitening() const {
  std::call_once(whitening_once_, [this] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_.entries);
    if (es.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (ev.minCoeff() < -1e-8 * std::abs(top))
      throw ValidationError("Gram matrix is not positive semidefinite (min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
      if (ev[k] > 1e-10 * top && ev[k] > 0) keep.push_back(k);
    whitening_.resize(gram_.entries.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
      whitening_.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(ev[keep[c]]);
  });
  return whitening_;
}

Score shapelet_score(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& bag_kernel) {
  if (bag_kernel.rows() == 0) throw ValidationError("shapelet_score: empty bag");
  if (alpha.size() != bag_kernel.cols()) throw ValidationError("shapelet_score: alpha does not match the pool");
  const Eigen::VectorXd s = bag_kernel * alpha;
  Score best{s[0], 0};
  for (Eigen::Index i = 1; i < s.size(); ++i) {
    if (s[i] > best.value) best = {s[i], static_cast<std::size_t>(i)};
  }
  return best;
}

Score shapelet_score(const ShapeletCoeffs& alpha, const Bag& bag, const InstancePool& pool, const KernelSpec& kernel) {
  if (bag.empty()) throw ValidationError("shapelet_score: empty bag");
  return shapelet_score(alpha.alpha, cross_kernel(kernel, bag, pool));
}

double edge(const Eigen::VectorXd& alpha, const KernelCache& cache, const WeightDist& d) {
  if (d.d.size() != cache.num_bags())
    throw ValidationError("edge: weight vector has " + std::to_string(d.d.size()) + " entries for " +
                          std::to_string(cache.num_bags()) + " bags");
  double e = 0;
  for (Eigen::Index i = 0; i < cache.num_bags(); ++i) {
    if (d.d[i] == 0) continue;
    e += d.d[i] * cache.labels()[i] * shapelet_score(alpha, cache.bag_kernel(i)).value;
  }
  return e;
}

double edge(const ShapeletCoeffs& alpha, const Sample& sample, const WeightDist& d, const InstancePool& pool,
            const KernelSpec& kernel) {
  if (d.d.size() != static_cast<Eigen::Index>(sample.size()))
    throw ValidationError("edge: weight vector length does not match the sample");
  double e = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double di = d.d[static_cast<Eigen::Index>(i)];
    if (di == 0) continue;
    e += di * sample[i].label * shapelet_score(alpha, sample[i].bag, pool, kernel).value;
  }
  return e;
}

std::vector<ShapeletCoeffs> rank_one_hot(const KernelCache& cache, const WeightDist& d, NormKind norm,
                                         std::size_t count) {
  const Eigen::Index p = cache.pool_size();
  if (p == 0) throw ValidationError("init_one_hot: empty pool");
  if (d.d.size() != cache.num_bags()) throw ValidationError("init_one_hot: weight vector length mismatch");
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(p), minus = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < cache.num_bags(); ++i) {
    const double w = d.d[i] * cache.labels()[i];
    if (w == 0) continue;
    plus += w * cache.bag_kernel(i).colwise().maxCoeff().transpose();
    minus -= w * cache.bag_kernel(i).colwise().minCoeff().transpose();
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
  if (norm == NormKind::L2Gram) {
    const auto diag = cache.gram().entries.diagonal();
    for (Eigen::Index z = 0; z < p; ++z) scale[z] = diag[z] > 0 ? 1.0 / std::sqrt(diag[z]) : 0.0;
  }
  struct Cand {
    double value;
    Eigen::Index z;
    bool negative;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(2 * p));
  for (Eigen::Index z = 0; z < p; ++z) {
    if (scale[z] == 0) continue;
    cands.push_back({scale[z] * plus[z], z, false});
    cands.push_back({scale[z] * minus[z], z, true});
  }
  if (cands.empty()) throw ValidationError("init_one_hot: every pool element has zero self-similarity");
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.value > b.value; });
  std::vector<ShapeletCoeffs> out;
  for (std::size_t k = 0; k < std::min(count, cands.size()); ++k) {
    ShapeletCoeffs a{Eigen::VectorXd::Zero(p), norm};
    a.alpha[cands[k].z] = (cands[k].negative ? -1.0 : 1.0) * scale[cands[k].z];
    out.push_back(std::move(a));
  }
  return out;
}

ShapeletCoeffs init_one_hot(const KernelCache& cache, const WeightDist& d, NormKind norm) {
  return rank_one_hot(cache, d, norm, 1).front();
}

ShapeletCoeffs init_one_hot(const Sample& sample, const WeightDist& d, const InstancePool& pool,
                            const KernelSpec& kernel, NormKind norm) {
  KernelCache cache(sample, pool, kernel);
  return init_one_hot(cache, d, norm);
}

std::vector<std::size_t> maximizers(const Eigen::VectorXd& alpha, const KernelCache& cache) {
  std::vector<std::size_t> out(static_cast<std::size_t>(cache.num_bags()));
  for (Eigen::Index i = 0; i < cache.num_bags(); ++i)
    out[static_cast<std::size_t>(i)] = shapelet_score(alpha, cache.bag_kernel(i)).index;
  return out;
}

namespace {

void check_subproblem_inputs(const std::vector<std::size_t>& fixed, const KernelCache& cache, const WeightDist& d) {
  if (d.d.size() != cache.num_bags()) throw ValidationError("subproblem: weight vector length mismatch");
  if (static_cast<Eigen::Index>(fixed.size()) != cache.num_bags())
    throw ValidationError("subproblem: need one maximizer entry per bag");
  for (Eigen::Index i = 0; i < cache.num_bags(); ++i) {
    if (cache.label(i) > 0 && fixed[static_cast<std::size_t>(i)] >= static_cast<std::size_t>(cache.bag_kernel(i).rows()))
      throw ValidationError("subproblem: maximizer index out of range for bag " + std::to_string(i));
  }
}

// sum_{k: y_k = +1} d_k k_{x*_k}
Eigen::VectorXd linear_gain(const std::vector<std::size_t>& fixed, const KernelCache& cache, const WeightDist& d) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(cache.pool_size());
  for (Eigen::Index k = 0; k < cache.num_bags(); ++k) {
    if (cache.label(k) < 0 || d.d[k] == 0) continue;
    g += d.d[k] * cache.bag_kernel(k).row(static_cast<Eigen::Index>(fixed[static_cast<std::size_t>(k)])).transpose();
  }
  return g;
}

// Euclidean projection onto the probability simplex.
void project_simplex(Eigen::Ref<Eigen::VectorXd> v) {
  const Eigen::Index n = v.size();
  if (n == 1) {
    v[0] = 1.0;
    return;
  }
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double cum = 0, theta = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  v = (v.array() - theta).cwiseMax(0.0);
}

}  // namespace

SubproblemResult linearized_subproblem_l1(const std::vector<std::size_t>& fixed, const KernelCache& cache,
                                          const WeightDist& d, const LpBackend* backend) {
  check_subproblem_inputs(fixed, cache, d);
  const Eigen::Index p = cache.pool_size();
  const Eigen::VectorXd g = linear_gain(fixed, cache, d);

  // Negative bags with zero weight leave alpha unconstrained; drop them.
  std::vector<Eigen::Index> negs;
  Eigen::Index rows = 0;
  for (Eigen::Index r = 0; r < cache.num_bags(); ++r) {
    if (cache.label(r) < 0 && d.d[r] > 0) {
      negs.push_back(r);
      rows += cache.bag_kernel(r).rows();
    }
  }
  const auto nneg = static_cast<Eigen::Index>(negs.size());

  // Solved through its LP dual, which has far fewer rows:
  //   min t  s.t.  -t <= (K_neg^T mu - g)_z <= t,  sum_{x in B_r} mu_x = d_r,  mu >= 0.
  // The optimum is -t* and alpha = q - p, where p, q are the multipliers of
  // the upper and lower rows.
  Eigen::MatrixXd kneg(rows, p);
  std::vector<Eigen::Index> first{0};
  for (Eigen::Index r : negs) {
    const Eigen::MatrixXd& kb = cache.bag_kernel(r);
    kneg.middleRows(first.back(), kb.rows()) = kb;
    first.push_back(first.back() + kb.rows());
  }
  // Most of the 2p pool rows are slack at the optimum (alpha is sparse), so
  // they are generated lazily: solve over a working set of pool indices, add
  // the most violated ones, repeat until none is violated.
  const Eigen::Index tcol = rows;
  const Eigen::Index batch = std::min<Eigen::Index>(p, 32);
  std::vector<Eigen::Index> working;
  std::vector<char> in_working(static_cast<std::size_t>(p), 0);
  auto add_by_score = [&](const Eigen::VectorXd& score) {
    std::vector<Eigen::Index> order;
    for (Eigen::Index z = 0; z < p; ++z)
      if (!in_working[static_cast<std::size_t>(z)]) order.push_back(z);
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(batch));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
    for (std::size_t k = 0; k < take; ++k) {
      working.push_back(order[k]);
      in_working[static_cast<std::size_t>(order[k])] = 1;
    }
  };
  add_by_score(g.cwiseAbs());

  const double scale = 1.0 + g.cwiseAbs().maxCoeff() + (rows > 0 ? kneg.cwiseAbs().maxCoeff() : 0.0);
  LpSolution sol;
  std::vector<Eigen::Index> upper, lower;
  for (;;) {
    LinearProgram lp(rows + 1);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(rows + 1);
    cost[tcol] = 1.0;
    lp.set_cost(cost);
    lp.set_bounds(tcol, -kInf, kInf);
    Eigen::VectorXd row(rows + 1);
    upper.clear();
    lower.clear();
    for (Eigen::Index z : working) {
      row.head(rows) = kneg.col(z);
      row[tcol] = -1.0;
      upper.push_back(lp.add_constraint(row, Relation::LessEqual, g[z]));
      row.head(rows) = -kneg.col(z);
      lower.push_back(lp.add_constraint(row, Relation::LessEqual, -g[z]));
    }
    for (Eigen::Index r = 0; r < nneg; ++r) {
      const auto b = static_cast<std::size_t>(r);
      row.setZero();
      row.segment(first[b], first[b + 1] - first[b]).setOnes();
      lp.add_constraint(row, Relation::Equal, d.d[negs[b]]);
    }

    sol = solve_lp(lp, backend);
    if (sol.status == LpStatus::Infeasible || sol.status == LpStatus::Unbounded)
      throw NumericalError("L1 subproblem reported " + to_string(sol.status) + "; the L1 ball is nonempty and bounded");
    if (!sol.optimal()) throw NumericalError("L1 subproblem LP failed: " + sol.message);

    const double t = sol.x[tcol];
    const Eigen::VectorXd excess =
        ((rows > 0 ? Eigen::VectorXd(kneg.transpose() * sol.x.head(rows)) : Eigen::VectorXd::Zero(p)) - g).cwiseAbs().array() - t;
    Eigen::VectorXd violation = excess;
    for (Eigen::Index z : working) violation[z] = -kInf;
    if (violation.maxCoeff() <= 1e-9 * scale) break;
    add_by_score(violation);
  }

  SubproblemResult out;
  out.alpha.norm = NormKind::L1;
  out.alpha.alpha = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < working.size(); ++k)
    out.alpha.alpha[working[k]] = sol.duals[lower[k]] - sol.duals[upper[k]];
  out.alpha.alpha = out.alpha.alpha.unaryExpr([](double v) { return std::abs(v) < 1e-13 ? 0.0 : v; });
  const double l1 = out.alpha.alpha.lpNorm<1>();
  if (l1 > 1.0) out.alpha.alpha /= l1;

  // Value of the original subproblem at alpha; must match -t*.
  double value = -g.dot(out.alpha.alpha);
  for (Eigen::Index r = 0; r < nneg; ++r) {
    const auto b = static_cast<std::size_t>(r);
    value += d.d[negs[b]] * (kneg.middleRows(first[b], first[b + 1] - first[b]) * out.alpha.alpha).maxCoeff();
  }
  if (std::abs(value + sol.objective) > 1e-6 * scale)
    throw NumericalError("L1 subproblem: recovered coefficients do not attain the LP optimum");
  out.objective = value;
  return out;
}

SubproblemResult linearized_subproblem_l2(const std::vector<std::size_t>& fixed, const KernelCache& cache,
                                          const WeightDist& d, double gap_tol, int max_iters) {
  check_subproblem_inputs(fixed, cache, d);
  const Eigen::MatrixXd& w = cache.whitening();
  const Eigen::Index rank = w.cols();
  SubproblemResult out;
  out.alpha.norm = NormKind::L2Gram;
  out.alpha.alpha = Eigen::VectorXd::Zero(cache.pool_size());
  if (rank == 0) return out;

  const Eigen::VectorXd ghat = w.transpose() * linear_gain(fixed, cache, d);

  // Rows d_r * k_x^T W for every x in every weighted negative bag.
  std::vector<Eigen::Index> offsets{0};
  std::vector<Eigen::MatrixXd> blocks;
  for (Eigen::Index r = 0; r < cache.num_bags(); ++r) {
    if (cache.label(r) > 0 || d.d[r] == 0) continue;
    blocks.push_back(d.d[r] * cache.bag_kernel(r) * w);
    offsets.push_back(offsets.back() + blocks.back().rows());
  }
  Eigen::MatrixXd m(offsets.back(), rank);
  for (std::size_t b = 0; b < blocks.size(); ++b) m.middleRows(offsets[b], blocks[b].rows()) = blocks[b];

  // Subproblem value at a feasible beta.
  auto primal = [&](const Eigen::VectorXd& beta) {
    double f = -ghat.dot(beta);
    if (m.rows() > 0) {
      const Eigen::VectorXd s = m * beta;
      for (std::size_t b = 0; b < blocks.size(); ++b)
        f += s.segment(offsets[b], offsets[b + 1] - offsets[b]).maxCoeff();
    }
    return f;
  };

  Eigen::VectorXd best_beta;
  double best_f = 0;
  if (m.rows() == 0) {
    const double n = ghat.norm();
    best_beta = n > 0 ? Eigen::VectorXd(ghat / n) : Eigen::VectorXd::Zero(rank);
    best_f = -n;
  } else {
    // min_pi 0.5 ||ghat - M^T pi||^2 over a product of simplices; the
    // subproblem optimum equals -min ||ghat - M^T pi||.
    auto project = [&](Eigen::VectorXd& pi) {
      for (std::size_t b = 0; b < blocks.size(); ++b)
        project_simplex(pi.segment(offsets[b], offsets[b + 1] - offsets[b]));
    };
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    const double lip = std::max(es.eigenvalues().maxCoeff(), 1e-300) * 1.0001;

    Eigen::VectorXd pi(m.rows());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto len = offsets[b + 1] - offsets[b];
      pi.segment(offsets[b], len).setConstant(1.0 / static_cast<double>(len));
    }
    Eigen::VectorXd y = pi;
    double t = 1.0;
    best_f = kInf;
    auto evaluate = [&](const Eigen::VectorXd& dual_pt) {
      const Eigen::VectorXd v = ghat - m.transpose() * dual_pt;
      const double nv = v.norm();
      const Eigen::VectorXd beta = nv > 0 ? Eigen::VectorXd(v / nv) : Eigen::VectorXd::Zero(rank);
      const double f = primal(beta);
      if (f < best_f) {
        best_f = f;
        best_beta = beta;
      }
      return f + nv;  // duality gap at (beta, dual_pt)
    };
    for (int it = 0; it < max_iters; ++it) {
      if (it % 10 == 0 && evaluate(pi) <= gap_tol * (1.0 + std::abs(best_f))) break;
      const Eigen::VectorXd grad = -(m * (ghat - m.transpose() * y));
      Eigen::VectorXd next = y - grad / lip;
      project(next);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      if ((y - next).dot(next - pi) > 0) {
        t = 1.0;  // adaptive restart
        y = next;
      } else {
        y = next + ((t - 1.0) / t_next) * (next - pi);
        t = t_next;
      }
      pi = next;
    }
    evaluate(pi);
    // best_beta is unit-norm or zero; zero is always feasible with value 0.
    if (best_f > 0) {
      best_f = 0;
      best_beta.setZero(rank);
    }
  }

  const double nb = best_beta.norm();
  if (nb > 1.0) best_beta /= nb;
  out.alpha.alpha = w * best_beta;
  out.objective = best_f;
  return out;
}

WeakLearnResult dc_weak_learn(const KernelCache& cache, const WeightDist& d, const WeakLearnOptions& opts,
                              const std::optional<ShapeletCoeffs>& start) {
  if (d.d.size() != cache.num_bags()) throw ValidationError("dc_weak_learn: weight vector length mismatch");
  if (!(opts.epsilon > 0)) throw ValidationError("dc_weak_learn: epsilon must be > 0");
  if (opts.max_outer < 1) throw ValidationError("dc_weak_learn: max_outer must be >= 1");
  if (start && start->alpha.size() != cache.pool_size())
    throw ValidationError("dc_weak_learn: starting point does not match the pool");

  std::vector<ShapeletCoeffs> starts;
  if (start)
    starts.push_back(*start);
  else
    starts = rank_one_hot(cache, d, opts.variant, static_cast<std::size_t>(std::max(1, opts.restarts)));

  std::optional<WeakLearnResult> best;
  for (const auto& alpha0 : starts) {
    WeakLearnResult run;
    run.alpha = alpha0;
    run.alpha.norm = opts.variant;
    double f_prev = -edge(run.alpha.alpha, cache, d);
    run.objective_trace.push_back(f_prev);
    for (int t = 1; t <= opts.max_outer; ++t) {
      ++run.iterations;
      const auto fixed = maximizers(run.alpha.alpha, cache);
      SubproblemResult sub = opts.variant == NormKind::L1 ? linearized_subproblem_l1(fixed, cache, d, opts.lp_backend)
                                                          : linearized_subproblem_l2(fixed, cache, d);
      if (!(sub.objective < f_prev)) break;  // no progress: keep the previous point
      run.alpha = std::move(sub.alpha);
      run.objective_trace.push_back(sub.objective);
      const bool done = f_prev - sub.objective <= opts.epsilon;
      f_prev = sub.objective;
      if (done) break;
    }
    run.edge = edge(run.alpha.alpha, cache, d);
    if (!best || run.edge > best->edge) best = std::move(run);
  }
  return *best;
}

bool is_feasible(const ShapeletCoeffs& alpha, const Eigen::MatrixXd& gram) {
  if (!alpha.alpha.allFinite()) return false;
  if (alpha.norm == NormKind::L1) return alpha.alpha.lpNorm<1>() <= 1.0 + 1e-9;
  if (gram.rows() != alpha.alpha.size()) return false;
  return alpha.alpha.dot(gram * alpha.alpha) <= 1.0 + 1e-6;
}

}  // namespace mil
