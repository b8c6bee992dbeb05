#ifndef MILBOOST_BOOSTING_HPP
#define MILBOOST_BOOSTING_HPP

#include "milboost/data.hpp"
#include "milboost/kernel.hpp"
#include "milboost/lp.hpp"
#include "milboost/weak_learner.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mil {

struct BoostConfig {
  double nu = 0.2;              // soft-margin parameter in (0, 1]
  double epsilon_weak = 1e-4;   // DC stopping threshold
  double epsilon_stop = 1e-5;   // column generation stops when edge <= gamma + epsilon_stop
  int max_iterations = 100;
  int max_outer = 50;           // DC iterations per weak-learner call
  NormKind weak_variant = NormKind::L1;
  int restarts = 0;
  std::uint64_t seed = 0;
  const LpBackend* lp_backend = nullptr;

  void validate() const;
};

struct WeightedShapelet {
  double weight = 0;
  ShapeletCoeffs shapelet;
};

struct TrainingMeta {
  int iterations = 0;         // weak-learner calls made
  int hypotheses = 0;         // columns in the final master
  double final_gamma = 0;
  std::string stop_reason;    // "edge", "max_iterations" or "first_edge_nonpositive"
  std::vector<int> pruned;    // master columns dropped for zero weight
};

/// g(B) = sum_j w_j max_{x in B} sum_z alpha_jz K(z, x).
struct EnsembleModel {
  std::vector<WeightedShapelet> shapelets;
  KernelSpec kernel;
  InstancePool pool;
  NormKind norm = NormKind::L1;
  double nu = 0.2;
  TrainingMeta meta;
};

/// One column-generation step.
struct IterationRecord {
  int iteration = 0;
  double edge = 0;             // edge of the new hypothesis under the previous d
  double gamma_before = 0;
  double gamma = 0;            // master optimum after adding the column (= gamma_before if not added)
  bool added = false;
  double weak_objective = 0;
  int weak_iterations = 0;
  std::vector<double> dc_trace;
  double master_gap = 0;       // |primal - dual| of the master certificate
  double master_infeasibility = 0;
  bool d_in_capped_simplex = true;
  double seconds = 0;
};

struct TrainResult {
  EnsembleModel model;
  std::vector<IterationRecord> history;
};

/// LPBoost column generation with the DC weak learner. `pool` overrides the
/// instance pool (e.g. k-means representatives); by default it is built from
/// the sample.
TrainResult lpboost_train(const Sample& sample, const KernelSpec& kernel, const BoostConfig& config,
                          std::optional<InstancePool> pool = std::nullopt);

struct ShapeletContribution {
  double value = 0;          // w_j * max score
  std::size_t maximizer = 0; // within-bag index
};

struct Prediction {
  int label = 1;
  double margin = 0;
  std::vector<ShapeletContribution> per_shapelet;
};

/// Label is sign(margin) with sign(0) = +1.
Prediction predict(const EnsembleModel& model, const Bag& bag);

/// Margins y_i g(B_i) for every bag of a sample.
Eigen::VectorXd margins(const EnsembleModel& model, const Sample& sample);

/// |{i : y_i g(B_i) < rho}| / m.
double empirical_margin_loss(const EnsembleModel& model, const Sample& sample, double rho);

}  // namespace mil

#endif  // MILBOOST_BOOSTING_HPP
