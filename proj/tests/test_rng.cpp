#include <doctest.h>

#include <cmath>

#include "relaysim/rng.hpp"

using namespace relaysim;

TEST_CASE("substreams replay identically and differ across indices") {
  Rng a = Rng::substream(42, 1, 7);
  Rng b = Rng::substream(42, 1, 7);
  Rng c = Rng::substream(42, 1, 8);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next();
    all_equal = all_equal && va == b.next();
    any_diff = any_diff || va != c.next();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays strictly inside (0,1)") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gaussian moments") {
  Rng rng(2);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("symbol is balanced") {
  Rng rng(3);
  int plus = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (rng.symbol() == 1) ++plus;
  CHECK(std::abs(plus - n / 2) < 4 * std::sqrt(n / 4.0));
}
