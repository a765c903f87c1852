#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacmc/parallel.hpp"

TEST_CASE("every index is visited exactly once") {
  std::vector<std::atomic<int>> hits(1000);
  pacmc::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("zero iterations is a no-op") {
  pacmc::parallel_for(0, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("the lowest failing index wins") {
  ::setenv("PACMC_WORKERS", "4", 1);
  try {
    pacmc::parallel_for(200, [](std::size_t i) {
      if (i % 50 == 17) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
  ::unsetenv("PACMC_WORKERS");
}

TEST_CASE("PACMC_WORKERS overrides the worker count") {
  ::setenv("PACMC_WORKERS", "3", 1);
  CHECK(pacmc::worker_count() == 3);
  ::setenv("PACMC_WORKERS", "junk", 1);
  CHECK(pacmc::worker_count() >= 1);
  ::unsetenv("PACMC_WORKERS");
}
