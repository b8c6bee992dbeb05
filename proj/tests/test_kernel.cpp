#include "doctest.h"

#include "milboost/kernel.hpp"

#include <cmath>
#include <random>

using mil::Instance;
using mil::KernelSpec;

TEST_CASE("kernel_eval values") {
  const Instance a{{1.0, 2.0}}, b{{3.0, 4.0}};
  CHECK(mil::kernel_eval(KernelSpec::linear(), a, b) == 11.0);
  CHECK(mil::kernel_eval(KernelSpec::gaussian(0.3), a, a) == 1.0);
  // ||a - c||^2 = 100
  const Instance c{{7.0, 10.0}};
  CHECK(mil::kernel_eval(KernelSpec::gaussian(0.01), a, c) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(mil::kernel_eval(KernelSpec::gaussian(0.01), a, c) == doctest::Approx(0.367879).epsilon(1e-6));
  // expression arguments
  CHECK(mil::kernel_eval(KernelSpec::linear(), 2.0 * a, b - a) == doctest::Approx(12.0));
}

TEST_CASE("kernel_eval errors") {
  const Instance a{{1.0, 2.0}}, b{{1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(mil::kernel_eval(KernelSpec::linear(), a, b), mil::ValidationError);
  CHECK_THROWS_AS(mil::kernel_eval(KernelSpec::gaussian(0.0), a, a), mil::ValidationError);
  auto pre = KernelSpec::precomputed(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(mil::kernel_eval(pre, a, a), mil::ValidationError);
  CHECK(mil::kernel_value(pre, Instance{{1.0}}, Instance{{1.0}}) == 1.0);
  CHECK_THROWS_AS(mil::kernel_value(pre, Instance{{2.0}}, Instance{{1.0}}), mil::ValidationError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(KernelSpec::precomputed(asym), mil::ValidationError);
}

TEST_CASE("kernel symmetry and gaussian range on random points") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    Instance a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
    }
    for (auto spec : {KernelSpec::linear(), KernelSpec::gaussian(0.5)})
      CHECK(mil::kernel_eval(spec, a, b) == mil::kernel_eval(spec, b, a));
    const double g = mil::kernel_eval(KernelSpec::gaussian(0.5), a, b);
    CHECK(g > 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("gram_matrix small cases") {
  mil::InstancePool pool;
  pool.instances = {Instance{{1.0, 0.0}}};
  pool.origins = {{0, 0}};
  auto g = mil::gram_matrix(KernelSpec::gaussian(0.1), pool);
  CHECK(g.entries.rows() == 1);
  CHECK(g.entries(0, 0) == 1.0);

  pool.instances.push_back(Instance{{0.0, 1.0}});
  pool.origins.push_back({1, 0});
  auto lin = mil::gram_matrix(KernelSpec::linear(), pool);
  CHECK(lin.entries.isApprox(Eigen::Matrix2d::Identity()));
  CHECK(lin.max_diagonal() == 1.0);

  CHECK_THROWS_AS(mil::gram_matrix(KernelSpec::linear(), mil::InstancePool{}), mil::ValidationError);
}

TEST_CASE("gaussian gram on 5 points is PSD; linear gram equals X X^T") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  mil::InstancePool pool;
  for (int i = 0; i < 5; ++i) {
    Instance x(4);
    for (int k = 0; k < 4; ++k) x[k] = nd(rng);
    pool.instances.push_back(x);
    pool.origins.push_back({static_cast<std::size_t>(i), 0});
  }
  auto g = mil::gram_matrix(KernelSpec::gaussian(0.05), pool);
  auto chk = mil::check_gram(g.entries);
  CHECK(chk.symmetric);
  CHECK(chk.psd);
  CHECK(chk.min_eigenvalue >= -1e-8);
  CHECK((g.entries.diagonal().array() == 1.0).all());

  auto lin = mil::gram_matrix(KernelSpec::linear(), pool);
  const Eigen::MatrixXd x = pool.rows();
  CHECK((lin.entries - x * x.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("cross_kernel matches pointwise evaluation") {
  mil::InstancePool pool;
  pool.instances = {Instance{{1.0, 0.0}}, Instance{{0.0, 1.0}}};
  pool.origins = {{0, 0}, {0, 1}};
  mil::Bag bag({Instance{{2.0, 0.0}}, Instance{{0.0, 3.0}}, Instance{{1.0, 1.0}}});
  for (auto spec : {KernelSpec::linear(), KernelSpec::gaussian(0.2)}) {
    auto k = mil::cross_kernel(spec, bag, pool);
    REQUIRE(k.rows() == 3);
    REQUIRE(k.cols() == 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(k(i, j) == doctest::Approx(mil::kernel_eval(spec, bag[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)])));
  }
  mil::Bag wrong({Instance{{1.0, 2.0, 3.0}}});
  CHECK_THROWS_AS(mil::cross_kernel(KernelSpec::linear(), wrong, pool), mil::ValidationError);
}
