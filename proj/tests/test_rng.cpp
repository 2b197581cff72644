#include <doctest.h>

#include <cmath>
#include <vector>

#include "uquant/math_util.hpp"
#include "uquant/rng.hpp"

using namespace uquant;

TEST_CASE("streams are pure functions of the seed") {
  Rng a(42), b(42), c(43);
  bool equal = true, differ = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next_u64();
    equal = equal && x == b.next_u64();
    differ = differ || x != c.next_u64();
  }
  CHECK(equal);
  CHECK(differ);
}

TEST_CASE("derived seeds separate replicate streams") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("uniform01 stays strictly inside the open interval") {
  Rng r(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = r.uniform01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
}

TEST_CASE("normal draws match the standard normal distribution") {
  Rng r(2026);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  for (double& d : draws) d = r.normal();
  CHECK(std::abs(mean(draws)) <= 0.02);
  CHECK(sample_variance(draws) == doctest::Approx(1.0).epsilon(0.05));
  // KS critical value at the 1% level is ~1.63/sqrt(n) ~ 0.0052
  CHECK(ks_distance(draws, [](double x) { return normal_cdf(x); }) <= 0.01);
}

TEST_CASE("rademacher draws are balanced signs") {
  Rng r(3);
  std::size_t plus = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = r.rademacher();
    REQUIRE((v == 1.0 || v == -1.0));
    plus += v > 0.0;
  }
  CHECK(std::abs(static_cast<double>(plus) / 100000.0 - 0.5) <= 0.01);
}
