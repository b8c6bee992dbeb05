// Shared generators for tests.
#ifndef MILBOOST_TESTS_FIXTURES_HPP
#define MILBOOST_TESTS_FIXTURES_HPP

#include "milboost/data.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

namespace fixtures {

inline mil::Instance vec(std::initializer_list<double> xs) {
  mil::Instance v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Random sample with m bags (both labels present) and the given bag sizes,
/// entries uniform in [-lim, lim].
inline mil::Sample random_sample(std::mt19937_64& rng, const std::vector<int>& bag_sizes, int dim, double lim) {
  std::uniform_real_distribution<double> ud(-lim, lim);
  mil::Sample s;
  for (std::size_t b = 0; b < bag_sizes.size(); ++b) {
    std::vector<mil::Instance> xs;
    for (int j = 0; j < bag_sizes[b]; ++j) {
      mil::Instance x(dim);
      for (int k = 0; k < dim; ++k) x[k] = ud(rng);
      xs.push_back(x);
    }
    s.add(mil::Bag(std::move(xs)), b % 2 == 0 ? 1 : -1);
  }
  return s;
}

/// Random point of the probability simplex.
inline Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index m) {
  std::exponential_distribution<double> ed(1.0);
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) d[i] = ed(rng);
  return d / d.sum();
}

/// Kernel values written out by hand: gaussian exp(-sigma ||a-b||^2) when
/// sigma > 0, dot product otherwise.
inline double direct_kernel(const mil::Instance& a, const mil::Instance& b, double sigma) {
  double acc = 0;
  if (sigma > 0) {
    for (Eigen::Index k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-sigma * acc);
  }
  for (Eigen::Index k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

inline oracle::TinyProblem tiny_problem(const mil::Sample& s, const std::vector<mil::Instance>& pool,
                                        const Eigen::VectorXd& d, double sigma) {
  oracle::TinyProblem pr;
  pr.k.resize(static_cast<Eigen::Index>(s.total_instances()), static_cast<Eigen::Index>(pool.size()));
  Eigen::Index r = 0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    pr.labels.push_back(s[b].label);
    for (const auto& x : s[b].bag) {
      for (std::size_t z = 0; z < pool.size(); ++z)
        pr.k(r, static_cast<Eigen::Index>(z)) = direct_kernel(pool[z], x, sigma);
      pr.bag_of.push_back(static_cast<int>(b));
      ++r;
    }
  }
  pr.d = d;
  return pr;
}

}  // namespace fixtures

#endif  // MILBOOST_TESTS_FIXTURES_HPP
