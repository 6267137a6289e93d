#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kmapf/assignment.hpp"
#include "kmapf/rng.hpp"
#include "support/oracles.hpp"

using namespace kmapf;

TEST_CASE("two by two picks the diagonal") {
  double total = 0.0;
  auto sol = hungarian({{1, 2}, {2, 1}}, &total);
  REQUIRE(sol.size() == 2);
  CHECK(sol[0] == 0);
  CHECK(sol[1] == 1);
  CHECK(total == doctest::Approx(2.0));
}

TEST_CASE("one by one") {
  double total = 0.0;
  auto sol = hungarian({{7}}, &total);
  REQUIRE(sol.size() == 1);
  CHECK(sol[0] == 0);
  CHECK(total == doctest::Approx(7.0));
}

TEST_CASE("empty matrix gives an empty assignment") {
  double total = 1.0;
  CHECK(hungarian({}, &total).empty());
  CHECK(total == 0.0);
}

TEST_CASE("rectangular matrices match min(m, n) pairs") {
  double total = 0.0;
  auto wide = hungarian({{5, 1, 9}}, &total);  // 1 agent, 3 tasks
  REQUIRE(wide.size() == 1);
  CHECK(wide[0] == 1);
  CHECK(total == doctest::Approx(1.0));

  auto tall = hungarian({{5}, {1}, {9}}, &total);  // 3 agents, 1 task
  REQUIRE(tall.size() == 3);
  CHECK(tall[0] == -1);
  CHECK(tall[1] == 0);
  CHECK(tall[2] == -1);
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("matches the permutation oracle on random matrices up to 6x6") {
  Rng rng(314159);
  for (int k = 0; k < 300; ++k) {
    int m = 1 + rng.uniform_int(6);
    int n = 1 + rng.uniform_int(6);
    std::vector<std::vector<double>> cost(static_cast<size_t>(m),
                                          std::vector<double>(static_cast<size_t>(n)));
    for (auto& row : cost)
      for (double& v : row) v = rng.uniform_int(100);
    double total = 0.0;
    auto sol = hungarian(cost, &total);
    // sanity: valid matching of min(m, n) pairs
    int matched = 0;
    std::vector<bool> used(static_cast<size_t>(n), false);
    for (int r = 0; r < m; ++r)
      if (sol[static_cast<size_t>(r)] >= 0) {
        ++matched;
        CHECK_FALSE(used[static_cast<size_t>(sol[static_cast<size_t>(r)])]);
        used[static_cast<size_t>(sol[static_cast<size_t>(r)])] = true;
      }
    CHECK(matched == std::min(m, n));
    CHECK(total == doctest::Approx(testing::assignment_oracle(cost)).epsilon(1e-9));
  }
}

TEST_CASE("ragged input is rejected") {
  CHECK_THROWS_AS(hungarian({{1, 2}, {3}}), std::invalid_argument);
}
