#include "milboost/data.hpp"

#include "milboost/error.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

namespace mil {

namespace {

Eigen::MatrixXd stack_rows(const std::vector<Instance>& xs) {
  if (xs.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), xs.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
  return out;
}

std::string bit_key(const Instance& x) {
  std::string key(static_cast<std::size_t>(x.size()) * sizeof(double), '\0');
  std::memcpy(key.data(), x.data(), key.size());
  return key;
}

}  // namespace

Eigen::MatrixXd Bag::rows() const { return stack_rows(instances_); }

Eigen::MatrixXd InstancePool::rows() const { return stack_rows(instances); }

Eigen::VectorXd Sample::labels() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(items_.size()));
  for (std::size_t i = 0; i < items_.size(); ++i) y[static_cast<Eigen::Index>(i)] = items_[i].label;
  return y;
}

std::size_t Sample::count_label(int label) const {
  std::size_t n = 0;
  for (const auto& it : items_) n += (it.label == label);
  return n;
}

std::size_t Sample::total_instances() const {
  std::size_t n = 0;
  for (const auto& it : items_) n += it.bag.size();
  return n;
}

Sample Sample::subset(const std::vector<std::size_t>& indices) const {
  std::vector<LabeledBag> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(items_.at(i));
  return Sample(std::move(out));
}

InstancePool build_pool(const Sample& sample) {
  if (sample.empty()) throw ValidationError("build_pool: empty sample");
  InstancePool pool;
  std::unordered_set<std::string> seen;
  for (std::size_t b = 0; b < sample.size(); ++b) {
    const Bag& bag = sample[b].bag;
    for (std::size_t j = 0; j < bag.size(); ++j) {
      if (seen.insert(bit_key(bag[j])).second) {
        pool.instances.push_back(bag[j]);
        pool.origins.push_back({b, j});
      }
    }
  }
  return pool;
}

std::string ValidationReport::summary() const {
  if (ok()) return "sample valid";
  std::ostringstream os;
  os << issues.size() << " validation issue(s):";
  for (const auto& is : issues) os << "\n  " << is.message;
  return os.str();
}

ValidationReport validate_sample(const Sample& sample, bool require_both_classes) {
  using Kind = ValidationIssue::Kind;
  ValidationReport rep;
  if (sample.empty()) {
    rep.issues.push_back({Kind::EmptySample, 0, 0, 0, "sample is empty"});
    return rep;
  }
  Eigen::Index dim = -1;
  for (std::size_t b = 0; b < sample.size(); ++b) {
    const auto& lb = sample[b];
    if (lb.label != 1 && lb.label != -1) {
      rep.issues.push_back({Kind::BadLabel, b, 0, 0,
                            "bag " + std::to_string(b) + ": label " + std::to_string(lb.label) +
                                " is not -1 or +1"});
    }
    if (lb.bag.empty()) {
      rep.issues.push_back({Kind::EmptyBag, b, 0, 0, "bag " + std::to_string(b) + " is empty"});
      continue;
    }
    for (std::size_t j = 0; j < lb.bag.size(); ++j) {
      const Instance& x = lb.bag[j];
      if (dim < 0) dim = x.size();
      if (x.size() == 0 || x.size() != dim) {
        rep.issues.push_back({Kind::DimensionMismatch, b, j, 0,
                              "bag " + std::to_string(b) + " instance " + std::to_string(j) +
                                  ": dimension " + std::to_string(x.size()) + ", expected " +
                                  std::to_string(dim)});
        continue;
      }
      for (Eigen::Index c = 0; c < x.size(); ++c) {
        if (!std::isfinite(x[c])) {
          rep.issues.push_back({Kind::NonFinite, b, j, static_cast<std::size_t>(c),
                                "bag " + std::to_string(b) + " instance " + std::to_string(j) +
                                    " coordinate " + std::to_string(c) + ": non-finite value"});
        }
      }
    }
  }
  if (require_both_classes) {
    const auto pos = sample.count_label(1);
    const auto neg = sample.count_label(-1);
    if (pos == 0 || neg == 0) {
      rep.issues.push_back({Kind::SingleClass, 0, 0, 0,
                            std::string("single class: all labels are ") + (pos ? "+1" : "-1")});
    }
  }
  return rep;
}

void require_valid(const Sample& sample, bool require_both_classes) {
  auto rep = validate_sample(sample, require_both_classes);
  if (!rep.ok()) throw ValidationError(rep.summary());
}

}  // namespace mil
