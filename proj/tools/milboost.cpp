#include "CLI11.hpp"

#include "milboost/error.hpp"
#include "milboost/harness.hpp"
#include "milboost/model_io.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct DataFlags {
  std::string path;
  std::string format = "ucr_ts";
  std::string index;
  std::string labels;

  void add(CLI::App* cmd) {
    cmd->add_option("--data", path, "input file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", format, "ucr_ts, bag_csv or gram_csv")
        ->check(CLI::IsMember({"ucr_ts", "bag_csv", "gram_csv"}));
    cmd->add_option("--index", index, "bag_id,label rows for gram_csv");
    cmd->add_option("--labels", labels, "label map, e.g. 'a:+1,b:-1' or '+a' (default: automatic)");
  }

  mil::Dataset load(const std::map<std::string, int>& fallback = {}) const {
    mil::DatasetSource src;
    src.format = mil::dataset_format_from_string(format);
    src.path = path;
    src.index_path = index;
    src.labels = mil::LabelMapping::parse(labels);
    if (src.labels.automatic() && !fallback.empty()) src.labels.map = fallback;
    return mil::load_dataset(src);
  }
};

struct TrainFlags {
  int length = 0;
  double length_frac = 0;
  bool znorm = false;
  std::string kernel = "gaussian";
  double sigma = 1.0;
  double nu = 0.2;
  int kmeans_k = 100;
  std::string weak = "l1";
  double epsilon = 1e-4;
  double epsilon_stop = 1e-5;
  int max_iter = 100;
  int restarts = 0;
  std::uint64_t seed = 0;

  void add(CLI::App* cmd, bool grid) {
    if (!grid) {
      auto* len = cmd->add_option("--length", length, "window length for series data");
      cmd->add_option("--length-frac", length_frac, "window length as a fraction of the shortest series")
          ->excludes(len);
      cmd->add_option("--sigma", sigma, "gaussian kernel width");
      cmd->add_option("--nu", nu, "soft-margin parameter in (0, 1]");
      cmd->add_option("--kernel", kernel, "gaussian or linear")->check(CLI::IsMember({"gaussian", "linear"}));
    }
    cmd->add_flag("--znorm", znorm, "z-normalise every window");
    cmd->add_option("--kmeans-k", kmeans_k, "pool size after k-means, 0 keeps every window");
    cmd->add_option("--weak", weak, "weak learner: l1 (sparse) or l2")->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--epsilon", epsilon, "DC stopping threshold");
    cmd->add_option("--epsilon-stop", epsilon_stop, "column generation tolerance");
    cmd->add_option("--max-iter", max_iter, "boosting iterations");
    cmd->add_option("--restarts", restarts, "extra random starts per weak-learner call");
    cmd->add_option("--seed", seed, "seed for k-means and restarts");
  }

  mil::PipelineConfig pipeline(const mil::Dataset& data) const {
    mil::PipelineConfig cfg;
    if (data.is_series()) {
      if (length <= 0 && length_frac <= 0) throw mil::ValidationError("series data needs --length or --length-frac");
      mil::WindowConfig w;
      w.znormalize = znorm;
      if (length > 0) w.length = length;
      else w.length_fraction = length_frac;
      cfg.window = w;
    }
    cfg.kernel = kernel == "linear" ? mil::KernelSpec::linear() : mil::KernelSpec::gaussian(sigma);
    cfg.kmeans_k = data.kernel.kind == mil::KernelKind::Precomputed ? 0 : kmeans_k;
    cfg.boost.nu = nu;
    cfg.boost.epsilon_weak = epsilon;
    cfg.boost.epsilon_stop = epsilon_stop;
    cfg.boost.max_iterations = max_iter;
    cfg.boost.weak_variant = mil::norm_kind_from_string(weak);
    cfg.boost.restarts = restarts;
    cfg.boost.seed = seed;
    return cfg;
  }
};

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mil::Error("cannot write " + path);
  out << text;
}

std::vector<std::string> row_ids(const mil::Dataset& data) {
  if (!data.bag_ids.empty()) return data.bag_ids;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < data.size(); ++i) ids.push_back(std::to_string(i));
  return ids;
}

// A precomputed model carries no Gram; borrow the one that came with the data.
mil::ModelFile load_for(const std::string& path, const mil::Dataset& data) {
  mil::ModelFile f = mil::load_model(path, data.kernel.gram);
  if (f.model.kernel.kind == mil::KernelKind::Precomputed && !data.kernel.gram)
    throw mil::ValidationError("model uses a precomputed kernel; pass the Gram matrix with --format gram_csv");
  return f;
}

std::map<std::string, int> peek_labels(const std::string& model_path) {
  std::ifstream in(model_path);
  if (!in) throw mil::Error("cannot open " + model_path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return mil::model_from_json(text).labels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapelet boosting for multiple-instance and time-series classification"};
  app.require_subcommand(1);

  DataFlags data;
  TrainFlags train;
  std::string model_path, history_path, out_path, csv_path;
  bool no_timing = false;

  auto* cmd_train = app.add_subcommand("train", "fit a model and write it as JSON");
  data.add(cmd_train);
  train.add(cmd_train, false);
  cmd_train->add_option("--model", model_path, "output model JSON")->required();
  cmd_train->add_option("--history", history_path, "per-iteration CSV");
  cmd_train->add_flag("--no-timing", no_timing, "leave wall-clock columns out of the history");

  auto* cmd_predict = app.add_subcommand("predict", "labels and margins as CSV");
  data.add(cmd_predict);
  cmd_predict->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  cmd_predict->add_option("--out", out_path, "output CSV (default stdout)");

  auto* cmd_eval = app.add_subcommand("eval", "accuracy report on a labelled test set");
  data.add(cmd_eval);
  cmd_eval->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--out", out_path, "report JSON (default stdout)");
  cmd_eval->add_option("--predictions", csv_path, "per-bag CSV");
  cmd_eval->add_flag("--no-timing", no_timing, "omit timing fields");

  std::vector<double> fracs{0.0}, nus{0.2}, sigmas{1.0};
  int folds = 5, repeats = 5;
  auto* cmd_cv = app.add_subcommand("cv", "grid search by repeated stratified k-fold");
  data.add(cmd_cv);
  train.add(cmd_cv, true);
  cmd_cv->add_option("--length-fracs", fracs, "window fractions (series data)")->delimiter(',');
  cmd_cv->add_option("--nus", nus, "nu values")->delimiter(',');
  cmd_cv->add_option("--sigmas", sigmas, "gaussian widths")->delimiter(',');
  cmd_cv->add_option("--folds", folds, "folds per repeat");
  cmd_cv->add_option("--repeats", repeats, "repeats");
  cmd_cv->add_option("--out", out_path, "result JSON (default stdout)");
  cmd_cv->add_option("--table", csv_path, "grid table CSV");

  std::size_t item = 0;
  auto* cmd_report = app.add_subcommand("report", "maximizers and pool patterns for one series or bag");
  data.add(cmd_report);
  cmd_report->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  cmd_report->add_option("--item", item, "which series or bag (0-based)");
  cmd_report->add_option("--out", out_path, "report JSON (default stdout)");
  cmd_report->add_option("--csv", csv_path, "report CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) {
      const mil::Dataset ds = data.load();
      const auto start = std::chrono::steady_clock::now();
      const mil::TrainedPipeline tp = mil::train_pipeline(ds, train.pipeline(ds));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      mil::save_model(model_path, tp.file);
      if (!history_path.empty()) write_file(history_path, mil::history_csv(tp.history, !no_timing));
      const mil::EvalReport fit = mil::evaluate(tp.file, ds);
      std::cerr << "trained " << tp.file.model.shapelets.size() << " shapelets in " << tp.file.model.meta.iterations
                << " iterations (" << tp.file.model.meta.stop_reason << "), training accuracy " << fit.accuracy;
      if (!no_timing) std::cerr << ", " << secs << " s";
      std::cerr << "\n";
    } else if (cmd_predict->parsed() || cmd_eval->parsed()) {
      const mil::Dataset ds = data.load(peek_labels(model_path));
      const mil::ModelFile f = load_for(model_path, ds);
      mil::EvalReport rep = mil::evaluate(f, ds);
      if (cmd_predict->parsed()) {
        write_file(out_path, mil::predictions_csv(rep, row_ids(ds)));
      } else {
        if (!csv_path.empty()) write_file(csv_path, mil::predictions_csv(rep, row_ids(ds)));
        write_file(out_path, mil::eval_json(rep, !no_timing));
      }
    } else if (cmd_cv->parsed()) {
      const mil::Dataset ds = data.load();
      mil::ExperimentGrid grid;
      grid.length_fractions = fracs;
      grid.nus = nus;
      grid.sigmas = sigmas;
      grid.folds = folds;
      grid.repeats = repeats;
      grid.seed = train.seed;
      if (ds.is_series() && fracs == std::vector<double>{0.0})
        throw mil::ValidationError("series data needs --length-fracs");
      train.length = 1;  // only carries --znorm; each cell sets its own window fraction
      const mil::CvResult res = mil::cross_validate(ds, grid, train.pipeline(ds));
      if (!csv_path.empty()) write_file(csv_path, mil::cv_csv(res));
      write_file(out_path, mil::cv_json(res));
    } else if (cmd_report->parsed()) {
      const mil::Dataset ds = data.load(peek_labels(model_path));
      const mil::ModelFile f = load_for(model_path, ds);
      if (item >= ds.size())
        throw mil::ValidationError("--item " + std::to_string(item) + " out of range (" + std::to_string(ds.size()) +
                                   " items)");
      const mil::MaximizerReport rep = ds.is_series() ? mil::report_maximizers(f, ds.series()[item])
                                                      : mil::report_maximizers(f.model, ds.sample()[item].bag);
      if (!csv_path.empty()) write_file(csv_path, mil::maximizers_csv(rep));
      write_file(out_path, mil::maximizers_json(rep));
    }
  } catch (const std::exception& e) {
    std::cerr << "milboost: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
