#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rdeq/exact_sum.hpp"
#include "test_util.hpp"

using rdeq::ExactAccumulator;

TEST_CASE("empty accumulator is zero") {
  ExactAccumulator acc;
  CHECK(acc.to_double() == 0.0);
  acc.add(0.0);
  CHECK(acc.to_double() == 0.0);
}

TEST_CASE("single value round trips exactly") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const double v = std::exp(rdeq::test::uniform(rng, -700.0, 700.0));
    ExactAccumulator acc;
    acc.add(v);
    CHECK(acc.to_double() == v);
  }
  for (double v : {5e-324, 1e-310, 2.2250738585072014e-308, 1.7976931348623157e308}) {
    ExactAccumulator acc;
    acc.add(v);
    CHECK(acc.to_double() == v);
  }
}

TEST_CASE("pair sums are correctly rounded (match IEEE addition)") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::exp(rdeq::test::uniform(rng, -40.0, 40.0));
    const double b = std::exp(rdeq::test::uniform(rng, -40.0, 40.0));
    ExactAccumulator acc;
    acc.add(a);
    acc.add(b);
    CHECK(acc.to_double() == a + b);
  }
}

TEST_CASE("sum is bit-identical under permutation") {
  std::mt19937_64 rng(3);
  std::vector<double> values(500);
  for (auto& v : values) v = std::exp(rdeq::test::uniform(rng, -300.0, 300.0));

  ExactAccumulator base;
  for (double v : values) base.add(v);
  const double expected = base.to_double();

  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(values.begin(), values.end(), rng);
    ExactAccumulator acc;
    for (double v : values) acc.add(v);
    CHECK(acc.to_double() == expected);
  }
}

TEST_CASE("agrees with compensated summation") {
  std::mt19937_64 rng(4);
  std::vector<double> values(10000);
  for (auto& v : values) v = std::exp(rdeq::test::uniform(rng, -30.0, 30.0));

  // Neumaier reference
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double reference = sum + comp;

  ExactAccumulator acc;
  for (double v : values) acc.add(v);
  CHECK(acc.to_double() == doctest::Approx(reference).epsilon(1e-15));
}

TEST_CASE("denormal inputs accumulate exactly") {
  ExactAccumulator acc;
  const double d = 5e-324;  // smallest positive double
  for (int i = 0; i < 1024; ++i) acc.add(d);
  CHECK(acc.to_double() == 1024 * 5e-324);
}

TEST_CASE("ties round to even") {
  // 1 + 2^-53 is exactly halfway between 1 and the next double; the exact
  // sum must round back to 1.
  ExactAccumulator acc;
  acc.add(1.0);
  acc.add(std::ldexp(1.0, -53));
  CHECK(acc.to_double() == 1.0);
}
