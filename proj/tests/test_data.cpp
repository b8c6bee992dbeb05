#include "doctest.h"

#include "milboost/data.hpp"
#include "milboost/error.hpp"

#include <limits>

using mil::Bag;
using mil::Instance;
using mil::Sample;

namespace {

Instance v2(double a, double b) { return Instance{{a, b}}; }

}  // namespace

TEST_CASE("build_pool keeps disjoint instances in order") {
  Sample s;
  s.add(Bag({v2(1, 0)}), 1);
  s.add(Bag({v2(0, 1)}), -1);
  auto pool = mil::build_pool(s);
  REQUIRE(pool.size() == 2);
  CHECK(pool[0] == v2(1, 0));
  CHECK(pool[1] == v2(0, 1));
  CHECK(pool.origins[1] == mil::Origin{1, 0});
}

TEST_CASE("build_pool removes exact duplicates, first occurrence wins") {
  Sample s;
  s.add(Bag({v2(1, 0), v2(0, 1)}), 1);
  s.add(Bag({v2(0, 1)}), -1);
  auto pool = mil::build_pool(s);
  REQUIRE(pool.size() == 2);
  CHECK(pool[1] == v2(0, 1));
  CHECK(pool.origins[1] == mil::Origin{0, 1});

  Sample same;
  for (int b = 0; b < 3; ++b) same.add(Bag({v2(2, 2), v2(2, 2), v2(2, 2)}), b % 2 ? 1 : -1);
  CHECK(mil::build_pool(same).size() == 1);
}

TEST_CASE("build_pool rejects an empty sample") { CHECK_THROWS_AS(mil::build_pool(Sample{}), mil::ValidationError); }

TEST_CASE("build_pool is deterministic and idempotent on singleton bags") {
  Sample s;
  s.add(Bag({v2(1, 2), v2(3, 4), v2(1, 2)}), 1);
  s.add(Bag({v2(3, 4), v2(5, 6)}), -1);
  auto p1 = mil::build_pool(s);
  auto p2 = mil::build_pool(s);
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);

  Sample singles;
  for (std::size_t i = 0; i < p1.size(); ++i) singles.add(Bag({p1[i]}), i % 2 ? 1 : -1);
  auto p3 = mil::build_pool(singles);
  REQUIRE(p3.size() == p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p3[i] == p1[i]);
}

TEST_CASE("validate_sample") {
  using Kind = mil::ValidationIssue::Kind;
  Sample ok;
  ok.add(Bag({v2(1, 0)}), 1);
  ok.add(Bag({v2(0, 1)}), -1);
  CHECK(mil::validate_sample(ok).ok());

  SUBCASE("non-finite entry reports coordinates") {
    Sample s = ok;
    s.add(Bag({v2(0, 0), v2(1, std::numeric_limits<double>::quiet_NaN())}), 1);
    auto rep = mil::validate_sample(s);
    REQUIRE(rep.issues.size() == 1);
    CHECK(rep.issues[0].kind == Kind::NonFinite);
    CHECK(rep.issues[0].bag == 2);
    CHECK(rep.issues[0].instance == 1);
    CHECK(rep.issues[0].coordinate == 1);
  }
  SUBCASE("single class") {
    Sample s;
    s.add(Bag({v2(1, 0)}), 1);
    s.add(Bag({v2(0, 1)}), 1);
    auto rep = mil::validate_sample(s);
    REQUIRE(!rep.ok());
    CHECK(rep.issues.back().kind == Kind::SingleClass);
    CHECK(rep.summary().find("single class") != std::string::npos);
    CHECK(mil::validate_sample(s, false).ok());
  }
  SUBCASE("dimension mismatch, empty bag, bad label") {
    Sample s = ok;
    s.add(Bag({Instance{{1.0, 2.0, 3.0}}}), 1);
    s.add(Bag{}, -1);
    s.add(Bag({v2(0, 0)}), 0);
    auto rep = mil::validate_sample(s);
    REQUIRE(rep.issues.size() == 3);
    CHECK(rep.issues[0].kind == Kind::DimensionMismatch);
    CHECK(rep.issues[1].kind == Kind::EmptyBag);
    CHECK(rep.issues[2].kind == Kind::BadLabel);
    CHECK_THROWS_AS(mil::require_valid(s), mil::ValidationError);
  }
}
