#include "milboost/timeseries.hpp"

#include "milboost/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mil {

int WindowConfig::resolve(Eigen::Index series_length) const {
  int ell = length;
  if (length_fraction) {
    const double f = *length_fraction;
    if (!(f > 0.0 && f <= 1.0)) throw ValidationError("window length fraction must lie in (0, 1]");
    ell = static_cast<int>(std::floor(f * static_cast<double>(series_length) + 0.5));
  }
  if (ell < 1) throw ValidationError("window length must be >= 1");
  if (ell > series_length)
    throw ValidationError("window length " + std::to_string(ell) + " exceeds series length " +
                          std::to_string(series_length));
  return ell;
}

WindowConfig WindowConfig::resolved_for(const std::vector<TimeSeries>& series) const {
  if (series.empty()) throw ValidationError("no time series");
  Eigen::Index shortest = series.front().values.size();
  for (const auto& s : series) shortest = std::min(shortest, s.values.size());
  WindowConfig out = *this;
  out.length = resolve(shortest);
  out.length_fraction.reset();
  return out;
}

Eigen::VectorXd znormalize(const Eigen::VectorXd& w) {
  const double mean = w.mean();
  Eigen::VectorXd c = w.array() - mean;
  const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(w.size()));
  if (sd < 1e-12) return Eigen::VectorXd::Zero(w.size());
  return c / sd;
}

Bag extract_bag(const Eigen::VectorXd& series, int length, bool znorm) {
  if (length < 1) throw ValidationError("window length must be >= 1");
  if (length > series.size())
    throw ValidationError("window length " + std::to_string(length) + " exceeds series length " +
                          std::to_string(series.size()));
  if (!series.allFinite()) throw ValidationError("time series contains a non-finite value");
  std::vector<Instance> windows;
  windows.reserve(static_cast<std::size_t>(series.size() - length + 1));
  for (Eigen::Index o = 0; o + length <= series.size(); ++o) {
    Eigen::VectorXd w = series.segment(o, length);
    windows.push_back(znorm ? znormalize(w) : w);
  }
  return Bag(std::move(windows));
}

Bag extract_bag(const TimeSeries& series, const WindowConfig& window) {
  return extract_bag(series.values, window.resolve(series.values.size()), window.znormalize);
}

Sample extract_sample(const std::vector<TimeSeries>& series, const WindowConfig& window) {
  if (window.length < 1 || window.length_fraction)
    throw ValidationError("extract_sample needs a resolved window length");
  Sample s;
  for (const auto& ts : series) s.add(extract_bag(ts.values, window.length, window.znormalize), ts.label);
  return s;
}

namespace {

// Index of the nearest centroid; ties go to the lower index.
std::pair<int, double> nearest(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& x) {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d2 = (centroids.row(c).transpose() - x).squaredNorm();
    if (d2 < dist) {
      dist = d2;
      best = static_cast<int>(c);
    }
  }
  return {best, dist};
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw ValidationError("kmeans: no points");
  if (k < 1 || k > n) throw ValidationError("kmeans: k must lie in [1, number of points]");
  if (max_iterations < 1) throw ValidationError("kmeans: max_iterations must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding
  KMeansResult r;
  r.centroids.resize(k, points.cols());
  const auto first = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n));
  r.centroids.row(0) = points.row(std::min(first, n - 1));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (points.row(i) - r.centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      const double target = unit(rng) * total;
      double acc = 0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0) {
          pick = i;
          break;
        }
      }
    }
    r.centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points.row(i) - r.centroids.row(c)).squaredNorm());
  }

  r.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [c, dd] = nearest(r.centroids, points.row(i).transpose());
      if (c != r.assignment[static_cast<std::size_t>(i)]) changed = true;
      r.assignment[static_cast<std::size_t>(i)] = c;
      dist[static_cast<std::size_t>(i)] = dd;
    }
    if (!changed && it > 0) break;

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : r.assignment) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // move the farthest point (from its own centroid) into the empty cluster
      // among points whose cluster would not become empty
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(i)]);
        if (counts[a] < 2) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      --counts[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(far)])];
      r.assignment[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[static_cast<std::size_t>(far)] = 0;
    }

    r.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) r.centroids.row(r.assignment[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) r.centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    double wcss = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      wcss += (points.row(i) - r.centroids.row(r.assignment[static_cast<std::size_t>(i)])).squaredNorm();
    r.wcss_history.push_back(wcss);
    r.iterations = it + 1;
  }
  return r;
}

InstancePool kmeans_representatives(const InstancePool& pool, int k, std::uint64_t seed, int max_iterations) {
  if (pool.empty()) throw ValidationError("kmeans_representatives: empty pool");
  if (k < 1) throw ValidationError("kmeans_representatives: k must be >= 1");
  if (static_cast<std::size_t>(k) >= pool.size()) return pool;
  const Eigen::MatrixXd pts = pool.rows();
  const KMeansResult km = kmeans(pts, k, seed, max_iterations);
  InstancePool out;
  for (Eigen::Index c = 0; c < km.centroids.rows(); ++c) {
    const Eigen::VectorXd z = km.centroids.row(c).transpose();
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double d = (pool[i] - z).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    out.instances.push_back(z);
    out.origins.push_back(pool.origins[best]);
  }
  return out;
}

}  // namespace mil
