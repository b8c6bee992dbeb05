#ifndef MILBOOST_WEAK_LEARNER_HPP
#define MILBOOST_WEAK_LEARNER_HPP

#include "milboost/data.hpp"
#include "milboost/kernel.hpp"
#include "milboost/lp.hpp"

#include <Eigen/Dense>

#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace mil {

/// Which ball the shapelet coefficients live in: alpha^T K alpha <= 1
/// (L2Gram) or ||alpha||_1 <= 1 (L1, sparse shapelets).
enum class NormKind { L2Gram, L1 };

std::string to_string(NormKind kind);
NormKind norm_kind_from_string(const std::string& name);

/// A shapelet u = sum_z alpha_z Phi(z), expressed over an instance pool.
struct ShapeletCoeffs {
  Eigen::VectorXd alpha;
  NormKind norm = NormKind::L1;
};

/// Boosting distribution over bags.
struct WeightDist {
  Eigen::VectorXd d;

  static WeightDist uniform(Eigen::Index m) {
    return {Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m))};
  }
  /// True when 0 <= d_i <= 1/(nu m) + tol and |sum d - 1| <= tol.
  bool in_capped_simplex(double nu, double tol = 1e-9) const;
};

struct Score {
  double value = 0;
  std::size_t index = 0;  // smallest within-bag index attaining the max
};

/// Kernel values of a training run, computed once: the pool Gram matrix
/// and, for every bag, the matrix whose rows are k_x for x in the bag.
class KernelCache {
 public:
  KernelCache(const Sample& sample, InstancePool pool, KernelSpec kernel);
  KernelCache(const KernelCache&) = delete;
  KernelCache& operator=(const KernelCache&) = delete;

  Eigen::Index num_bags() const { return static_cast<Eigen::Index>(bag_kernels_.size()); }
  Eigen::Index pool_size() const { return static_cast<Eigen::Index>(pool_.size()); }
  const InstancePool& pool() const { return pool_; }
  const KernelSpec& kernel() const { return kernel_; }
  const GramMatrix& gram() const { return gram_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  int label(Eigen::Index i) const { return labels_[i] > 0 ? 1 : -1; }
  const Eigen::MatrixXd& bag_kernel(Eigen::Index i) const { return bag_kernels_[static_cast<std::size_t>(i)]; }

  /// Columns W with alpha = W beta giving alpha^T K alpha = ||beta||^2 on
  /// the range of K. Computed on first use; throws ValidationError when the
  /// Gram matrix is not PSD within tolerance.
  const Eigen::MatrixXd& whitening() const;

 private:
  InstancePool pool_;
  KernelSpec kernel_;
  GramMatrix gram_;
  Eigen::VectorXd labels_;
  std::vector<Eigen::MatrixXd> bag_kernels_;
  mutable std::once_flag whitening_once_;
  mutable Eigen::MatrixXd whitening_;
};

/// max_{x in bag} sum_z alpha_z K(z, x) from a precomputed bag kernel.
Score shapelet_score(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& bag_kernel);
Score shapelet_score(const ShapeletCoeffs& alpha, const Bag& bag, const InstancePool& pool,
                     const KernelSpec& kernel);

/// sum_i d_i y_i h_alpha(B_i).
double edge(const Eigen::VectorXd& alpha, const KernelCache& cache, const WeightDist& d);
double edge(const ShapeletCoeffs& alpha, const Sample& sample, const WeightDist& d, const InstancePool& pool,
            const KernelSpec& kernel);

/// One-hot candidates +-e_z ranked by the edge of the feasible-boundary
/// vector (scaled by 1/sqrt(K_zz) in the L2 case). Ties: lower pool index,
/// then positive sign. Returns at most `count` candidates.
std::vector<ShapeletCoeffs> rank_one_hot(const KernelCache& cache, const WeightDist& d, NormKind norm,
                                         std::size_t count);
ShapeletCoeffs init_one_hot(const KernelCache& cache, const WeightDist& d, NormKind norm);
ShapeletCoeffs init_one_hot(const Sample& sample, const WeightDist& d, const InstancePool& pool,
                            const KernelSpec& kernel, NormKind norm);

/// Within-bag index of the maximizer for every bag (entries for negative
/// bags are filled too but ignored by the subproblems).
std::vector<std::size_t> maximizers(const Eigen::VectorXd& alpha, const KernelCache& cache);

struct SubproblemResult {
  ShapeletCoeffs alpha;
  double objective = 0;  // optimum of the convex subproblem
};

/// Convex subproblem after linearizing the positive-bag term at fixed
/// maximizers x*_k:
///
///   min  sum_{r: y_r=-1} d_r lambda_r - sum_{k: y_k=+1} d_k k_{x*_k}^T alpha
///   s.t. k_x^T alpha <= lambda_r   for every negative bag r and x in B_r,
///        ||alpha||_1 <= 1.
///
/// Solved as an LP over alpha = alpha+ - alpha-.
SubproblemResult linearized_subproblem_l1(const std::vector<std::size_t>& fixed_maximizers, const KernelCache& cache,
                                          const WeightDist& d, const LpBackend* backend = nullptr);

/// Same objective under alpha^T K alpha <= 1. Solved through its dual, a
/// minimum-norm problem over a product of simplices (one per negative bag),
/// with accelerated projected gradient and a primal-dual gap stopping test.
SubproblemResult linearized_subproblem_l2(const std::vector<std::size_t>& fixed_maximizers, const KernelCache& cache,
                                          const WeightDist& d, double gap_tol = 1e-9, int max_iters = 20000);

struct WeakLearnOptions {
  NormKind variant = NormKind::L1;
  double epsilon = 1e-4;
  int max_outer = 50;
  /// Number of top one-hot starts to run; values <= 1 mean a single start.
  int restarts = 0;
  const LpBackend* lp_backend = nullptr;
};

struct WeakLearnResult {
  ShapeletCoeffs alpha;
  /// Objective of the starting point followed by each accepted subproblem
  /// optimum; non-increasing.
  std::vector<double> objective_trace;
  double edge = 0;
  int iterations = 0;
};

/// DC iteration for the weak-learning problem: fix the positive-bag
/// maximizers, solve the convex subproblem, repeat until the objective
/// decrease is at most epsilon or max_outer is reached. Starts from the best
/// one-hot vector unless `start` is supplied.
WeakLearnResult dc_weak_learn(const KernelCache& cache, const WeightDist& d, const WeakLearnOptions& opts,
                              const std::optional<ShapeletCoeffs>& start = std::nullopt);

/// Coefficient-ball feasibility: alpha^T K alpha <= 1 + 1e-6 or
/// ||alpha||_1 <= 1 + 1e-9.
bool is_feasible(const ShapeletCoeffs& alpha, const Eigen::MatrixXd& gram);

}  // namespace mil

#endif  // MILBOOST_WEAK_LEARNER_HPP
