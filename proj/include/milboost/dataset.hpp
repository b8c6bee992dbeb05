#ifndef MILBOOST_DATASET_HPP
#define MILBOOST_DATASET_HPP

#include "milboost/data.hpp"
#include "milboost/kernel.hpp"
#include "milboost/timeseries.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mil {

enum class DatasetFormat { UcrTs, BagCsv, GramCsv };
std::string to_string(DatasetFormat f);
DatasetFormat dataset_format_from_string(const std::string& name);

/// Original label text -> +1 / -1. Empty means automatic: exactly two labels,
/// the lexicographically smaller one maps to -1.
struct LabelMapping {
  std::map<std::string, int> map;  // explicit entries
  std::string positive;            // one-vs-rest: this label -> +1, all others -> -1

  bool automatic() const { return map.empty() && positive.empty(); }
  /// "a:+1,b:-1" for an explicit map, "+X" for one-vs-rest, "" or "auto".
  static LabelMapping parse(const std::string& text);
  /// Resolves against the observed labels. Throws ValidationError on an
  /// uncovered label or, in automatic mode, on more or fewer than two labels.
  std::map<std::string, int> resolve(const std::vector<std::string>& observed) const;
};

/// Numeric labels are normalised ("1.0000e+00" -> "1") so train and test
/// files written with different precision agree.
std::string canonical_label(const std::string& token);

struct DatasetSource {
  DatasetFormat format = DatasetFormat::UcrTs;
  std::string path;
  std::string index_path;  // gram_csv only: rows "bag_id,label"
  LabelMapping labels;
};

/// A loaded dataset: raw series or ready-made bags.
struct Dataset {
  std::variant<std::vector<TimeSeries>, Sample> data;
  KernelSpec kernel;                    // precomputed kernel for gram_csv
  std::vector<std::string> bag_ids;     // bag_csv / gram_csv
  std::map<std::string, int> label_map; // resolved mapping

  bool is_series() const { return std::holds_alternative<std::vector<TimeSeries>>(data); }
  const std::vector<TimeSeries>& series() const { return std::get<std::vector<TimeSeries>>(data); }
  const Sample& sample() const { return std::get<Sample>(data); }
  std::size_t size() const;
  std::vector<int> labels() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Throws ParseError (with the line number) on malformed input and
/// ValidationError on label problems.
Dataset load_dataset(const DatasetSource& source);

std::vector<TimeSeries> parse_ucr(std::istream& in, const std::string& name, const LabelMapping& labels,
                                  std::map<std::string, int>* resolved = nullptr);
Sample parse_bag_csv(std::istream& in, const std::string& name, const LabelMapping& labels,
                     std::vector<std::string>* bag_ids = nullptr, std::map<std::string, int>* resolved = nullptr);

}  // namespace mil

#endif  // MILBOOST_DATASET_HPP
