#ifndef MILBOOST_HARNESS_HPP
#define MILBOOST_HARNESS_HPP

#include "milboost/boosting.hpp"
#include "milboost/dataset.hpp"
#include "milboost/model_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mil {

/// Everything between raw data and a trained model.
struct PipelineConfig {
  std::optional<WindowConfig> window;  // required for series data
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  int kmeans_k = 0;                    // 0 keeps the full pool
  int kmeans_max_iterations = 100;
  BoostConfig boost;
};

struct TrainedPipeline {
  ModelFile file;
  std::vector<IterationRecord> history;
};

/// Bags for a dataset: windows of each series, or the stored bags.
Sample to_sample(const Dataset& data, const std::optional<WindowConfig>& window);

/// window extraction -> optional k-means -> lpboost_train.
TrainedPipeline train_pipeline(const Dataset& data, const PipelineConfig& config);

struct BagResult {
  int truth = 0;
  int predicted = 0;
  double margin = 0;
};

struct EvalReport {
  std::string mode = "fixed_split";  // or "cross_validation"
  double accuracy = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // confusion counts, positive class = +1
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::vector<BagResult> bags;
  std::optional<double> train_seconds;
  std::optional<double> predict_seconds;
};

EvalReport evaluate(const EnsembleModel& model, const Sample& test);
EvalReport evaluate(const ModelFile& file, const Dataset& test);

struct ExperimentGrid {
  std::vector<double> length_fractions{0.0};  // ignored for bag data
  std::vector<double> nus;
  std::vector<double> sigmas;
  int folds = 5;
  int repeats = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GridCell {
  double length_fraction = 0;
  double nu = 0;
  double sigma = 0;
  double mean_accuracy = 0;
  double stdev = 0;
  std::vector<double> repeat_accuracies;
};

struct CvResult {
  GridCell best;
  std::vector<GridCell> table;  // grid order: length fraction, then nu, then sigma
};

/// Stratified folds: every class spread round-robin over `folds` after a
/// seeded shuffle. Returns fold index per item.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

/// Grid search by repeated stratified k-fold CV. `base` supplies everything
/// not on the grid (kernel kind is forced to Gaussian unless precomputed).
CvResult cross_validate(const Dataset& data, const ExperimentGrid& grid, const PipelineConfig& base);

struct ShapeletRow {
  std::size_t shapelet = 0;
  double weight = 0;
  double score = 0;          // max_x <u, Phi(x)>
  double value = 0;          // weight * score
  std::size_t offset = 0;    // maximizer within the bag / start in the series
  Eigen::VectorXd raw;       // maximizer values before normalisation
};

struct PatternRow {
  std::size_t shapelet = 0;
  std::size_t pool_index = 0;
  double alpha = 0;
  double weighted_alpha = 0; // w_j * alpha_jz
  Origin origin;             // training provenance of z
  std::size_t aligned_offset = 0;
  double aligned_distance = 0;
  Eigen::VectorXd values;
};

struct MaximizerReport {
  double margin = 0;
  int predicted = 1;
  std::vector<ShapeletRow> shapelets;
  std::vector<PatternRow> patterns;
};

/// Per-shapelet maximizers and nonzero pool coefficients for one input.
/// For a series, offsets are window starts and raw values come from the
/// series itself; z alignment uses Euclidean distance against every window.
MaximizerReport report_maximizers(const ModelFile& file, const TimeSeries& series);
MaximizerReport report_maximizers(const EnsembleModel& model, const Bag& bag);

// Plot-ready writers. Timing fields are omitted when `with_timing` is false.
std::string history_csv(const std::vector<IterationRecord>& history, bool with_timing = true);
std::string predictions_csv(const EvalReport& report, const std::vector<std::string>& ids = {});
std::string eval_json(const EvalReport& report, bool with_timing = true);
std::string cv_json(const CvResult& result);
std::string cv_csv(const CvResult& result);
std::string maximizers_csv(const MaximizerReport& report);
std::string maximizers_json(const MaximizerReport& report);

}  // namespace mil

#endif  // MILBOOST_HARNESS_HPP
