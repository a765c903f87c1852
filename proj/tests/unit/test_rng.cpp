#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pacmc/rng.hpp"

using pacmc::RandomStream;

TEST_CASE("same seed and name replay the same draws") {
  RandomStream a(42, "times");
  RandomStream b(42, "times");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different names or seeds give different streams") {
  RandomStream a(42, "times");
  RandomStream b(42, "inputs");
  RandomStream c(43, "times");
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("split is deterministic and distinct from the parent") {
  RandomStream parent(7, "root");
  RandomStream c1 = parent.split("child");
  RandomStream c2 = parent.split("child");
  CHECK(c1.key() == c2.key());
  CHECK(c1.key() != parent.key());
}

TEST_CASE("uniform respects its bounds") {
  RandomStream r(1, "u");
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform(-2.0, 3.0);
    REQUIRE(v >= -2.0);
    REQUIRE(v <= 3.0);
  }
  CHECK(r.uniform(5.0, 5.0) == 5.0);
}

TEST_CASE("uniform01 passes a Kolmogorov-Smirnov test") {
  RandomStream r(2024, "ks");
  const int n = 20000;
  std::vector<double> v(n);
  for (double& x : v) x = r.uniform01();
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max(d, std::abs(v[i] - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - v[i]));
  }
  // alpha = 0.001
  CHECK(d < 1.95 / std::sqrt(static_cast<double>(n)));
}
