#include "milboost/boosting.hpp"

#include "milboost/error.hpp"

#include <chrono>
#include <cmath>

namespace mil {

void BoostConfig::validate() const {
  if (!(nu > 0.0 && nu <= 1.0)) throw ValidationError("nu must lie in (0, 1]");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (max_outer < 1) throw ValidationError("max_outer must be >= 1");
  if (!(epsilon_weak > 0)) throw ValidationError("epsilon_weak must be > 0");
  if (!(epsilon_stop >= 0)) throw ValidationError("epsilon_stop must be >= 0");
}

TrainResult lpboost_train(const Sample& sample, const KernelSpec& kernel, const BoostConfig& config,
                          std::optional<InstancePool> pool) {
  require_valid(sample, true);
  config.validate();
  kernel.validate();
  if (!pool) pool = build_pool(sample);
  if (pool->empty()) throw ValidationError("lpboost_train: empty instance pool");
  if (pool->dim() != sample.dim())
    throw ValidationError("lpboost_train: pool dimension does not match the sample");

  const KernelCache cache(sample, std::move(*pool), kernel);
  const Eigen::Index m = cache.num_bags();

  WeakLearnOptions wopts;
  wopts.variant = config.weak_variant;
  wopts.epsilon = config.epsilon_weak;
  wopts.max_outer = config.max_outer;
  wopts.restarts = config.restarts;
  wopts.lp_backend = config.lp_backend;

  TrainResult result;
  WeightDist d = WeightDist::uniform(m);
  double gamma = 0.0;
  std::vector<ShapeletCoeffs> hyps;
  Eigen::MatrixXd cols(m, 0);
  Eigen::VectorXd w;
  std::string stop_reason = "max_iterations";

  using clock = std::chrono::steady_clock;
  for (int t = 1; t <= config.max_iterations; ++t) {
    const auto start = clock::now();
    WeakLearnResult wl = dc_weak_learn(cache, d, wopts);

    IterationRecord rec;
    rec.iteration = t;
    rec.edge = wl.edge;
    rec.gamma_before = gamma;
    rec.gamma = gamma;
    rec.weak_objective = wl.objective_trace.back();
    rec.weak_iterations = wl.iterations;
    rec.dc_trace = wl.objective_trace;
    result.model.meta.iterations = t;

    if (wl.edge <= gamma + config.epsilon_stop) {
      if (hyps.empty()) {
        hyps.push_back(std::move(wl.alpha));
        w = Eigen::VectorXd::Ones(1);
        stop_reason = "first_edge_nonpositive";
      } else {
        stop_reason = "edge";
      }
      rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
      result.history.push_back(std::move(rec));
      break;
    }

    Eigen::VectorXd col(m);
    for (Eigen::Index i = 0; i < m; ++i)
      col[i] = cache.labels()[i] * shapelet_score(wl.alpha.alpha, cache.bag_kernel(i)).value;
    cols.conservativeResize(m, cols.cols() + 1);
    cols.col(cols.cols() - 1) = col;
    hyps.push_back(std::move(wl.alpha));

    const MasterSolution master = solve_restricted_master(cols, config.nu, config.lp_backend);
    gamma = master.gamma;
    d.d = master.d;
    w = master.w;

    rec.added = true;
    rec.gamma = gamma;
    rec.master_gap = master.certificate.duality_gap;
    rec.master_infeasibility = master.certificate.primal_infeasibility;
    rec.d_in_capped_simplex = d.in_capped_simplex(config.nu);
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.history.push_back(std::move(rec));
  }

  EnsembleModel& model = result.model;
  model.kernel = kernel;
  model.pool = cache.pool();
  model.norm = config.weak_variant;
  model.nu = config.nu;
  model.meta.stop_reason = stop_reason;
  model.meta.final_gamma = gamma;
  model.meta.hypotheses = static_cast<int>(hyps.size());

  double total = 0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] <= 1e-10) {
      model.meta.pruned.push_back(static_cast<int>(j));
      continue;
    }
    total += w[j];
  }
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] <= 1e-10) continue;
    model.shapelets.push_back({w[j] / total, hyps[static_cast<std::size_t>(j)]});
  }
  if (model.shapelets.empty()) throw NumericalError("lpboost_train: master returned no positive weight");
  return result;
}

Prediction predict(const EnsembleModel& model, const Bag& bag) {
  if (model.shapelets.empty()) throw ValidationError("predict: empty model");
  if (bag.empty()) throw ValidationError("predict: empty bag");
  const Eigen::MatrixXd kb = cross_kernel(model.kernel, bag, model.pool);
  Prediction p;
  p.per_shapelet.reserve(model.shapelets.size());
  for (const auto& ws : model.shapelets) {
    const Score s = shapelet_score(ws.shapelet.alpha, kb);
    p.per_shapelet.push_back({ws.weight * s.value, s.index});
    p.margin += ws.weight * s.value;
  }
  p.label = p.margin >= 0 ? 1 : -1;
  return p;
}

Eigen::VectorXd margins(const EnsembleModel& model, const Sample& sample) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t i = 0; i < sample.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = sample[i].label * predict(model, sample[i].bag).margin;
  return out;
}

double empirical_margin_loss(const EnsembleModel& model, const Sample& sample, double rho) {
  if (!(rho >= 0)) throw ValidationError("empirical_margin_loss: rho must be >= 0");
  if (sample.empty()) throw ValidationError("empirical_margin_loss: empty sample");
  const Eigen::VectorXd mg = margins(model, sample);
  return static_cast<double>((mg.array() < rho).count()) / static_cast<double>(mg.size());
}

}  // namespace mil
