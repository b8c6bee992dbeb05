#ifndef MILBOOST_MODEL_IO_HPP
#define MILBOOST_MODEL_IO_HPP

#include "milboost/boosting.hpp"
#include "milboost/timeseries.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace mil {

/// A trained model plus the preprocessing needed to apply it to raw series.
struct ModelFile {
  EnsembleModel model;
  std::optional<WindowConfig> window;  // resolved length; absent for bag data
  std::map<std::string, int> labels;   // original label text -> +1/-1, may be empty
};

inline constexpr int kModelFormatVersion = 1;

/// Serialized JSON text (see docs/model_format.md). Deterministic: equal
/// models give byte-identical output.
std::string model_to_json(const ModelFile& file);

/// Parses model JSON. A precomputed-kernel model stores no Gram matrix;
/// pass it as `gram` to make the result usable for prediction.
ModelFile model_from_json(const std::string& text, std::shared_ptr<const Eigen::MatrixXd> gram = nullptr);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path, std::shared_ptr<const Eigen::MatrixXd> gram = nullptr);

}  // namespace mil

#endif  // MILBOOST_MODEL_IO_HPP
