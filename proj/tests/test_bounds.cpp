#include <catch2/catch_amalgamated.hpp>

#include <globalar/bounds.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace globalar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bound half-width", "[bounds]") {
  const double ln2 = std::numbers::ln2;
  auto r = bound_halfwidth({ln2, 50, 1, 0.05});
  // sqrt((ln 2 + ln 40) / 100), evaluated by hand: ln 80 = 4.382026635
  CHECK_THAT(r.t, WithinAbs(0.20933, 5e-6));
  CHECK_THAT(r.t, WithinRel(std::sqrt(std::log(80.0) / 100.0), 1e-15));
  CHECK(r.query.n == 50);
  CHECK_THAT(bound_halfwidth({ln2, 200, 1, 0.05}).t, WithinRel(r.t / 2, 1e-12));
  CHECK_THAT(bound_halfwidth({ln2, 200, 1, 0.05}).t, WithinAbs(0.104665, 5e-6));
}

TEST_CASE("matched local and global complexities give the same bound", "[bounds]") {
  const std::vector<double> local{1.5, 2.0, 0.5};
  const double global = 4.0;
  CHECK(bound_halfwidth({local_log_complexity(local), 30, 3, 0.1}).t ==
        bound_halfwidth({global, 30, 3, 0.1}).t);
}

TEST_CASE("local complexity sums per-series log sizes", "[bounds]") {
  const std::vector<double> four(4, std::log(3.0));
  CHECK_THAT(local_log_complexity(four), WithinRel(std::log(81.0), 1e-15));
  CHECK(local_log_complexity(std::vector<double>{2.5}) == 2.5);
  CHECK(local_log_complexity(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(local_log_complexity(std::vector<double>{1, -0.1}), DomainError);
  CHECK_THROWS_AS(local_log_complexity(std::vector<double>{}), DomainError);
}

TEST_CASE("memory equivalence sums local orders", "[bounds]") {
  CHECK(memory_equivalent(std::vector<long long>{2, 3, 5}) == 10);
  CHECK(memory_equivalent(std::vector<long long>{7}) == 7);
  CHECK_THROWS_AS(memory_equivalent(std::vector<long long>{}), DomainError);
  // Equal total memory means equal class size under 64-bit parameters.
  const std::vector<long long> orders{2, 3, 5};
  std::vector<double> logs;
  for (auto l : orders) logs.push_back(parameter_log_complexity(static_cast<double>(l)));
  CHECK_THAT(local_log_complexity(logs),
             WithinRel(parameter_log_complexity(static_cast<double>(memory_equivalent(orders))), 1e-15));
  CHECK_THAT(parameter_log_complexity(1), WithinRel(64 * std::numbers::ln2, 1e-15));
}

TEST_CASE("partitioned bound reductions", "[bounds]") {
  const double x = 3.7;
  CHECK(partitioned_bound(std::vector<double>{x}, 80, 12, 0.05).t == bound_halfwidth({x, 80, 12, 0.05}).t);

  const std::vector<double> ten(10, x);
  CHECK_THAT(partitioned_bound(ten, 100, 100, 0.05).t,
             WithinRel(std::sqrt((10 * x + std::log(40.0)) / 20000.0), 1e-14));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0, 50);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ls(1 + static_cast<std::size_t>(trial % 20));
    for (auto& v : ls) v = unif(rng);
    const double k = static_cast<double>(ls.size());
    REQUIRE(bound_halfwidth({local_log_complexity(ls), 25, k, 0.01}).t ==
            partitioned_bound(ls, 25, k, 0.01).t);
  }
  CHECK_THROWS_AS(partitioned_bound(ten, 100, 5, 0.05), DomainError);
  CHECK_THROWS_AS(partitioned_bound(std::vector<double>{}, 100, 5, 0.05), DomainError);
}

TEST_CASE("bounds are monotone and follow the square-root law", "[bounds][property]") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> logh(0, 100), nd(1, 1000), kd(1, 500), dd(0.001, 0.5),
      bump(1.01, 3);
  for (int trial = 0; trial < 500; ++trial) {
    BoundQuery q{logh(rng), nd(rng), std::floor(kd(rng)), dd(rng)};
    const double t = bound_halfwidth(q).t;
    REQUIRE(t > 0);
    auto more = q;
    more.log_hyp += bump(rng);
    REQUIRE(bound_halfwidth(more).t > t);
    more = q;
    more.n *= bump(rng);
    REQUIRE(bound_halfwidth(more).t < t);
    more = q;
    more.k += 1;
    REQUIRE(bound_halfwidth(more).t < t);
    more = q;
    more.delta /= bump(rng);
    REQUIRE(bound_halfwidth(more).t > t);
    more = q;
    more.n *= 2;
    more.k *= 2;
    REQUIRE_THAT(bound_halfwidth(more).t, WithinRel(t / 2, 1e-12));
  }
}

TEST_CASE("bound inputs are validated", "[bounds]") {
  CHECK_THROWS_AS(bound_halfwidth({1, 50, 1, 0.0}), DomainError);
  CHECK_THROWS_AS(bound_halfwidth({1, 50, 1, 1.0}), DomainError);
  CHECK_THROWS_AS(bound_halfwidth({1, 0, 1, 0.05}), DomainError);
  CHECK_THROWS_AS(bound_halfwidth({1, 50, 0, 0.05}), DomainError);
  CHECK_THROWS_AS(bound_halfwidth({-1, 50, 1, 0.05}), DomainError);
}
