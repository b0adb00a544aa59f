#include "riskmono/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace riskmono;

TEST_CASE("derived seeds separate tags and indices") {
  std::set<std::uint64_t> seen;
  for (const char* tag : {"split", "bag", "x", "noise"})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, tag, i));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, "bag", 3) == derive_seed(7, "bag", 3));
  CHECK(derive_seed(7, "bag", 3) != derive_seed(8, "bag", 3));
}

TEST_CASE("streams are reproducible") {
  CounterRng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CounterRng c(99);
  c();
  CHECK(c.counter() == 1);
}

TEST_CASE("uniform and normal moments") {
  CounterRng rng(1234);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sn4 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3.0) < 4 * std::sqrt(96.0 / n));
}

TEST_CASE("bounded integers are uniform") {
  CounterRng rng(5);
  const int bound = 7, draws = 70000;
  std::vector<int> counts(bound, 0);
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.below(bound);
    REQUIRE(v < static_cast<std::uint64_t>(bound));
    ++counts[v];
  }
  double chi2 = 0;
  const double expected = double(draws) / bound;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.46);  // 0.999 quantile with 6 degrees of freedom
  CHECK(rng.below(1) == 0);
}

TEST_CASE("sampling without replacement") {
  CounterRng rng(3);
  auto s = sample_without_replacement(20, 12, rng);
  REQUIRE(s.size() == 12);
  std::set<std::size_t> u(s.begin(), s.end());
  CHECK(u.size() == 12);
  CHECK(*u.rbegin() < 20);

  CounterRng r1(11), r2(11);
  const auto small = sample_without_replacement(30, 5, r1);
  const auto big = sample_without_replacement(30, 9, r2);
  CHECK(std::equal(small.begin(), small.end(), big.begin()));

  CounterRng r3(4);
  auto all = sample_without_replacement(6, 6, r3);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}
