#ifndef MILBOOST_DATA_HPP
#define MILBOOST_DATA_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace mil {

/// A point of the instance space. Length is the instance dimension.
using Instance = Eigen::VectorXd;

/// An ordered, nonempty list of instances of equal dimension.
class Bag {
 public:
  Bag() = default;
  explicit Bag(std::vector<Instance> instances) : instances_(std::move(instances)) {}

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  /// Dimension of the first instance, 0 for an empty bag.
  Eigen::Index dim() const { return empty() ? 0 : instances_.front().size(); }

  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const { return instances_; }
  auto begin() const { return instances_.begin(); }
  auto end() const { return instances_.end(); }

  /// Instances stacked as rows (size() x dim()).
  Eigen::MatrixXd rows() const;

 private:
  std::vector<Instance> instances_;
};

struct LabeledBag {
  Bag bag;
  int label = 1;  // -1 or +1
};

/// A labeled training or test set. Validation is separate (validate_sample)
/// so that malformed input can be reported instead of rejected blindly.
class Sample {
 public:
  Sample() = default;
  explicit Sample(std::vector<LabeledBag> items) : items_(std::move(items)) {}

  void add(Bag bag, int label) { items_.push_back({std::move(bag), label}); }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const LabeledBag& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<LabeledBag>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  Eigen::Index dim() const { return empty() ? 0 : items_.front().bag.dim(); }
  Eigen::VectorXd labels() const;
  std::size_t count_label(int label) const;
  std::size_t total_instances() const;

  /// Sub-sample made of the given bag indices, in the given order.
  Sample subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<LabeledBag> items_;
};

/// Location of an instance in the data it came from.
struct Origin {
  std::size_t bag = 0;
  std::size_t offset = 0;
  bool operator==(const Origin&) const = default;
};

/// The deduplicated union of all training instances, in first-occurrence
/// order, with provenance back to (bag, within-bag offset).
struct InstancePool {
  std::vector<Instance> instances;
  std::vector<Origin> origins;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  const Instance& operator[](std::size_t i) const { return instances[i]; }
  Eigen::Index dim() const { return empty() ? 0 : instances.front().size(); }
  /// Pool instances stacked as rows (size() x dim()).
  Eigen::MatrixXd rows() const;
};

/// Builds P_S. Exact (bitwise) duplicates are dropped, first occurrence kept.
/// Throws ValidationError on an empty sample.
InstancePool build_pool(const Sample& sample);

struct ValidationIssue {
  enum class Kind { EmptySample, EmptyBag, BadLabel, DimensionMismatch, NonFinite, SingleClass };
  Kind kind;
  std::size_t bag = 0;
  std::size_t instance = 0;
  std::size_t coordinate = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Checks every invariant of a Sample. `require_both_classes` adds the
/// training-time requirement of at least one bag of each label.
ValidationReport validate_sample(const Sample& sample, bool require_both_classes = true);

/// Throws ValidationError carrying the report summary when validation fails.
void require_valid(const Sample& sample, bool require_both_classes = true);

}  // namespace mil

#endif  // MILBOOST_DATA_HPP
