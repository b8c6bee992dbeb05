#include "milboost/harness.hpp"

#include "milboost/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace mil {

using json = nlohmann::ordered_json;

Sample to_sample(const Dataset& data, const std::optional<WindowConfig>& window) {
  if (!data.is_series()) return data.sample();
  if (!window) throw ValidationError("time-series data needs a window length");
  const WindowConfig w = window->length_fraction ? window->resolved_for(data.series()) : *window;
  return extract_sample(data.series(), w);
}

TrainedPipeline train_pipeline(const Dataset& data, const PipelineConfig& config) {
  TrainedPipeline out;
  if (data.is_series()) {
    if (!config.window) throw ValidationError("time-series data needs a window length");
    out.file.window = config.window->length_fraction ? config.window->resolved_for(data.series()) : *config.window;
  }
  const Sample sample = to_sample(data, out.file.window);
  const KernelSpec kernel = data.kernel.kind == KernelKind::Precomputed ? data.kernel : config.kernel;

  std::optional<InstancePool> pool;
  if (config.kmeans_k > 0) {
    if (kernel.kind == KernelKind::Precomputed)
      throw ValidationError("k-means reduction needs instance vectors; not available with a precomputed kernel");
    require_valid(sample, true);
    pool = kmeans_representatives(build_pool(sample), config.kmeans_k, config.boost.seed,
                                  config.kmeans_max_iterations);
  }
  TrainResult r = lpboost_train(sample, kernel, config.boost, std::move(pool));
  out.file.model = std::move(r.model);
  out.file.labels = data.label_map;
  out.history = std::move(r.history);
  return out;
}

EvalReport evaluate(const EnsembleModel& model, const Sample& test) {
  if (test.empty()) throw ValidationError("evaluate: empty test set");
  const auto start = std::chrono::steady_clock::now();
  EvalReport rep;
  for (const auto& item : test) {
    if (item.label != 1 && item.label != -1) throw ValidationError("evaluate: test labels must be +1 or -1");
    const Prediction p = predict(model, item.bag);
    rep.bags.push_back({item.label, p.label, p.margin});
    if (p.label == item.label) ++rep.correct;
    if (item.label == 1) (p.label == 1 ? rep.tp : rep.fn)++;
    else (p.label == 1 ? rep.fp : rep.tn)++;
  }
  rep.total = test.size();
  rep.accuracy = static_cast<double>(rep.correct) / static_cast<double>(rep.total);
  rep.predict_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

EvalReport evaluate(const ModelFile& file, const Dataset& test) {
  if (test.is_series() && !file.window) throw ValidationError("model has no window settings for time-series input");
  return evaluate(file.model, to_sample(test, file.window));
}

void ExperimentGrid::validate() const {
  if (length_fractions.empty() || nus.empty() || sigmas.empty())
    throw ValidationError("grid lists must be nonempty");
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be >= 2");
  std::vector<int> out(labels.size(), -1);
  std::mt19937_64 rng(seed);
  int next = 0;
  for (int cls : {-1, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    if (static_cast<int>(idx.size()) < folds)
      throw ValidationError("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                            " members, fewer than " + std::to_string(folds) + " folds");
    // Fisher-Yates with our own draw so the order does not depend on the library
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
    for (std::size_t i : idx) out[i] = next++ % folds;
  }
  return out;
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

bool better(const GridCell& a, const GridCell& b) {
  if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
  if (a.sigma != b.sigma) return a.sigma < b.sigma;
  if (a.length_fraction != b.length_fraction) return a.length_fraction < b.length_fraction;
  return a.nu < b.nu;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const ExperimentGrid& grid, const PipelineConfig& base) {
  grid.validate();
  const std::vector<int> labels = data.labels();
  std::vector<std::vector<int>> fold_of;
  for (int r = 0; r < grid.repeats; ++r)
    fold_of.push_back(stratified_folds(labels, grid.folds, derive_seed(grid.seed, static_cast<std::uint64_t>(r))));

  const bool precomputed = data.kernel.kind == KernelKind::Precomputed;
  const std::vector<double> fractions = data.is_series() ? grid.length_fractions : std::vector<double>{0.0};
  const std::vector<double> sigmas = precomputed ? std::vector<double>{0.0} : grid.sigmas;

  CvResult res;
  for (double lf : fractions) {
    for (double nu : grid.nus) {
      for (double sigma : sigmas) {
        PipelineConfig cfg = base;
        if (data.is_series()) {
          WindowConfig w = base.window.value_or(WindowConfig{});
          w.length_fraction = lf;
          cfg.window = w;
        }
        if (!precomputed) cfg.kernel = KernelSpec::gaussian(sigma);
        cfg.boost.nu = nu;

        GridCell cell{lf, nu, sigma, 0, 0, {}};
        for (int r = 0; r < grid.repeats; ++r) {
          cfg.boost.seed = derive_seed(grid.seed, static_cast<std::uint64_t>(r));
          std::size_t correct = 0;
          for (int f = 0; f < grid.folds; ++f) {
            std::vector<std::size_t> tr, te;
            for (std::size_t i = 0; i < labels.size(); ++i)
              (fold_of[static_cast<std::size_t>(r)][i] == f ? te : tr).push_back(i);
            const TrainedPipeline tp = train_pipeline(data.subset(tr), cfg);
            correct += evaluate(tp.file, data.subset(te)).correct;
          }
          cell.repeat_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(labels.size()));
        }
        const auto n = static_cast<double>(cell.repeat_accuracies.size());
        double sum = 0;
        for (double a : cell.repeat_accuracies) sum += a;
        cell.mean_accuracy = sum / n;
        double ss = 0;
        for (double a : cell.repeat_accuracies) ss += (a - cell.mean_accuracy) * (a - cell.mean_accuracy);
        cell.stdev = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        res.table.push_back(std::move(cell));
      }
    }
  }
  res.best = res.table.front();
  for (const auto& c : res.table)
    if (better(c, res.best)) res.best = c;
  return res;
}

namespace {

void align(const Bag& bag, const Eigen::VectorXd& z, std::size_t& offset, double& dist) {
  offset = 0;
  dist = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < bag.size(); ++o) {
    const double d = (bag[o] - z).norm();
    if (d < dist) {
      dist = d;
      offset = o;
    }
  }
}

}  // namespace

MaximizerReport report_maximizers(const EnsembleModel& model, const Bag& bag) {
  if (bag.empty()) throw ValidationError("report_maximizers: empty bag");
  if (bag.dim() != model.pool.dim())
    throw ValidationError("report_maximizers: input dimension " + std::to_string(bag.dim()) +
                          " does not match the model (" + std::to_string(model.pool.dim()) + ")");
  const Prediction p = predict(model, bag);
  MaximizerReport rep;
  rep.margin = p.margin;
  rep.predicted = p.label;
  for (std::size_t j = 0; j < model.shapelets.size(); ++j) {
    const auto& ws = model.shapelets[j];
    const auto& c = p.per_shapelet[j];
    rep.shapelets.push_back({j, ws.weight, c.value / ws.weight, c.value, c.maximizer, bag[c.maximizer]});
    for (Eigen::Index z = 0; z < ws.shapelet.alpha.size(); ++z) {
      const double a = ws.shapelet.alpha[z];
      if (a == 0.0) continue;
      PatternRow row;
      row.shapelet = j;
      row.pool_index = static_cast<std::size_t>(z);
      row.alpha = a;
      row.weighted_alpha = ws.weight * a;
      row.origin = model.pool.origins[static_cast<std::size_t>(z)];
      row.values = model.pool[static_cast<std::size_t>(z)];
      align(bag, row.values, row.aligned_offset, row.aligned_distance);
      rep.patterns.push_back(std::move(row));
    }
  }
  return rep;
}

MaximizerReport report_maximizers(const ModelFile& file, const TimeSeries& series) {
  if (!file.window) throw ValidationError("report_maximizers: model has no window settings for series input");
  const int ell = file.window->length;
  const Bag bag = extract_bag(series.values, ell, file.window->znormalize);
  MaximizerReport rep = report_maximizers(file.model, bag);
  for (auto& row : rep.shapelets) row.raw = series.values.segment(static_cast<Eigen::Index>(row.offset), ell);
  return rep;
}

namespace {

std::ostringstream number_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string joined(const Eigen::VectorXd& v) {
  std::ostringstream os = number_stream();
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

std::string history_csv(const std::vector<IterationRecord>& history, bool with_timing) {
  std::ostringstream os = number_stream();
  os << "iteration,gamma,edge,weak_objective,weak_iterations,added,master_gap";
  if (with_timing) os << ",seconds";
  os << "\n";
  for (const auto& h : history) {
    os << h.iteration << ',' << h.gamma << ',' << h.edge << ',' << h.weak_objective << ',' << h.weak_iterations
       << ',' << (h.added ? 1 : 0) << ',' << h.master_gap;
    if (with_timing) os << ',' << h.seconds;
    os << "\n";
  }
  return os.str();
}

std::string predictions_csv(const EvalReport& report, const std::vector<std::string>& ids) {
  std::ostringstream os = number_stream();
  os << "index,id,label,predicted,margin\n";
  for (std::size_t i = 0; i < report.bags.size(); ++i) {
    const auto& b = report.bags[i];
    os << i << ',' << (i < ids.size() ? ids[i] : std::to_string(i)) << ',' << b.truth << ',' << b.predicted << ','
       << b.margin << "\n";
  }
  return os.str();
}

std::string eval_json(const EvalReport& r, bool with_timing) {
  json j;
  j["mode"] = r.mode;
  j["accuracy"] = r.accuracy;
  j["correct"] = r.correct;
  j["total"] = r.total;
  j["confusion"] = {{"tp", r.tp}, {"fn", r.fn}, {"fp", r.fp}, {"tn", r.tn}};
  json bags = json::array();
  for (const auto& b : r.bags) bags.push_back({{"label", b.truth}, {"predicted", b.predicted}, {"margin", b.margin}});
  j["bags"] = std::move(bags);
  if (with_timing) {
    json t = json::object();
    if (r.train_seconds) t["train_seconds"] = *r.train_seconds;
    if (r.predict_seconds) t["predict_seconds"] = *r.predict_seconds;
    j["timing"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

std::string cv_json(const CvResult& r) {
  auto cell = [](const GridCell& c) {
    return json{{"length_fraction", c.length_fraction}, {"nu", c.nu},           {"sigma", c.sigma},
                {"mean_accuracy", c.mean_accuracy},     {"stdev", c.stdev},     {"repeats", c.repeat_accuracies}};
  };
  json j;
  j["mode"] = "cross_validation";
  j["best"] = cell(r.best);
  json t = json::array();
  for (const auto& c : r.table) t.push_back(cell(c));
  j["table"] = std::move(t);
  return j.dump(2) + "\n";
}

std::string cv_csv(const CvResult& r) {
  std::ostringstream os = number_stream();
  os << "length_fraction,nu,sigma,mean_accuracy,stdev\n";
  for (const auto& c : r.table)
    os << c.length_fraction << ',' << c.nu << ',' << c.sigma << ',' << c.mean_accuracy << ',' << c.stdev << "\n";
  return os.str();
}

std::string maximizers_csv(const MaximizerReport& r) {
  std::ostringstream os = number_stream();
  os << "kind,shapelet,weight,score,value,offset,pool_index,alpha,weighted_alpha,origin_bag,origin_offset,"
        "distance,values\n";
  for (const auto& s : r.shapelets)
    os << "maximizer," << s.shapelet << ',' << s.weight << ',' << s.score << ',' << s.value << ',' << s.offset
       << ",,,,,,," << joined(s.raw) << "\n";
  for (const auto& p : r.patterns)
    os << "pattern," << p.shapelet << ",,,," << p.aligned_offset << ',' << p.pool_index << ',' << p.alpha << ','
       << p.weighted_alpha << ',' << p.origin.bag << ',' << p.origin.offset << ',' << p.aligned_distance << ','
       << joined(p.values) << "\n";
  return os.str();
}

std::string maximizers_json(const MaximizerReport& r) {
  json j;
  j["margin"] = r.margin;
  j["predicted"] = r.predicted;
  json sh = json::array();
  for (const auto& s : r.shapelets)
    sh.push_back({{"shapelet", s.shapelet}, {"weight", s.weight}, {"score", s.score},
                  {"value", s.value},       {"offset", s.offset}, {"values", vec(s.raw)}});
  j["shapelets"] = std::move(sh);
  json pt = json::array();
  for (const auto& p : r.patterns)
    pt.push_back({{"shapelet", p.shapelet},
                  {"pool_index", p.pool_index},
                  {"alpha", p.alpha},
                  {"weighted_alpha", p.weighted_alpha},
                  {"origin", {p.origin.bag, p.origin.offset}},
                  {"aligned_offset", p.aligned_offset},
                  {"aligned_distance", p.aligned_distance},
                  {"values", vec(p.values)}});
  j["patterns"] = std::move(pt);
  return j.dump(2) + "\n";
}

}  // namespace mil
