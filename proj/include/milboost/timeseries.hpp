#ifndef MILBOOST_TIMESERIES_HPP
#define MILBOOST_TIMESERIES_HPP

#include "milboost/data.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mil {

struct TimeSeries {
  Eigen::VectorXd values;
  int label = 0;  // +1 / -1, 0 when unknown
};

/// Sliding-window settings. Either `length` is set directly or it is derived
/// from `length_fraction` as round_half_up(fraction * L).
struct WindowConfig {
  int length = 0;
  std::optional<double> length_fraction;
  bool znormalize = false;

  /// Window length for series of length `series_length`.
  int resolve(Eigen::Index series_length) const;
  /// Copy with `length` fixed for a set of series (shortest length wins).
  WindowConfig resolved_for(const std::vector<TimeSeries>& series) const;
};

/// All contiguous windows of length ell, offset o -> instance o.
/// Throws ValidationError when ell < 1 or ell > series length.
Bag extract_bag(const Eigen::VectorXd& series, int length, bool znormalize = false);
Bag extract_bag(const TimeSeries& series, const WindowConfig& window);

/// One bag per series (bag index = series index). `window.length` must be
/// resolved. Pool provenance (bag, offset) then maps to (series, start).
Sample extract_sample(const std::vector<TimeSeries>& series, const WindowConfig& window);

/// Window with zero mean and unit standard deviation; constant windows map to zero.
Eigen::VectorXd znormalize(const Eigen::VectorXd& w);

struct KMeansResult {
  Eigen::MatrixXd centroids;          // k x dim
  std::vector<int> assignment;        // per point
  std::vector<double> wcss_history;   // after each Lloyd iteration
  int iterations = 0;
};

/// Seeded k-means++ followed by Lloyd iterations. An empty cluster is
/// re-seeded at the point farthest from its current centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations = 100);

/// Replaces the pool by k centroids. Each centroid keeps the origin of its
/// nearest original instance. Returns the pool unchanged when k >= its size.
InstancePool kmeans_representatives(const InstancePool& pool, int k, std::uint64_t seed, int max_iterations = 100);

}  // namespace mil

#endif  // MILBOOST_TIMESERIES_HPP
