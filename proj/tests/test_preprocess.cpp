#include <catch2/catch_amalgamated.hpp>

#include <globalar/preprocess.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace globalar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TimeSeries series(std::vector<double> v, int m = 1) {
  TimeSeries s;
  s.id = "x";
  s.values = std::move(v);
  s.season_period = m;
  return s;
}

}  // namespace

TEST_CASE("fit_scale computes the mode's denominator", "[preprocess]") {
  // (|2-1| + |4-2|) / 2
  CHECK(fit_scale(series({1, 2, 4}), ScaleMode::mase).scale == 1.5);
  CHECK(fit_scale(series({5, 5, 5}), ScaleMode::none).scale == 1.0);
  // (3 + 3 + 3) / 3
  CHECK(fit_scale(series({3, -3, 3}), ScaleMode::mean).scale == 3.0);
}

TEST_CASE("seasonal MASE scale uses lag m differences", "[preprocess]") {
  auto s = series({1, 2, 3, 4, 3, 6}, 2);
  // |3-1| + |4-2| + |3-3| + |6-4| = 6 over 4 terms
  CHECK(fit_scale(s, ScaleMode::mase, true).scale == 1.5);
  // lag 1: 1+1+1+1+3 = 7 over 5
  CHECK_THAT(fit_scale(s, ScaleMode::mase, false).scale, WithinRel(1.4, 1e-15));
  CHECK_THROWS_AS(fit_scale(series({1, 2}, 2), ScaleMode::mase, true), DegenerateScaleError);
}

TEST_CASE("degenerate scales are errors", "[preprocess]") {
  CHECK_THROWS_AS(fit_scale(series({5, 5, 5}), ScaleMode::mase), DegenerateScaleError);
  CHECK_THROWS_AS(fit_scale(series({0, 0, 0}), ScaleMode::mean), DegenerateScaleError);
  CHECK_THROWS_AS(fit_scale(series({1}), ScaleMode::mase), DegenerateScaleError);
}

TEST_CASE("apply and invert scale", "[preprocess]") {
  auto rec = fit_scale(series({1, 2, 4}), ScaleMode::mase);
  auto scaled = apply_scale(series({1, 2, 4}), rec);
  CHECK_THAT(scaled.values[0], WithinRel(2.0 / 3.0, 1e-15));
  CHECK_THAT(scaled.values[1], WithinRel(4.0 / 3.0, 1e-15));
  CHECK_THAT(scaled.values[2], WithinRel(8.0 / 3.0, 1e-15));

  auto none = fit_scale(series({7, 9}), ScaleMode::none);
  CHECK(apply_scale(series({7, 9}), none).values == std::vector<double>{7, 9});

  TimeSeries other = series({1, 2});
  other.id = "y";
  CHECK_THROWS_AS(apply_scale(other, rec), DomainError);
}

TEST_CASE("invert(apply(x)) recovers x", "[preprocess][property]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise;
  std::uniform_real_distribution<double> mag(-8, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(10);
    const double c = std::pow(10.0, mag(rng));
    for (auto& x : v) x = c * noise(rng);
    for (auto mode : {ScaleMode::none, ScaleMode::mase, ScaleMode::mean}) {
      auto rec = fit_scale(series(v), mode);
      CHECK(rec.scale > 0.0);
      if (mode == ScaleMode::none) CHECK(rec.scale == 1.0);
      auto back = invert_scale(apply_scale(v, rec), rec);
      for (std::size_t t = 0; t < v.size(); ++t)
        REQUIRE_THAT(back[t], WithinRel(v[t], 1e-12) || WithinAbs(v[t], 0.0));
    }
  }
}

TEST_CASE("scale_feature is the log of the scale", "[preprocess]") {
  CHECK(scale_feature({"x", ScaleMode::none, 1.0}) == 0.0);
  CHECK_THAT(scale_feature({"x", ScaleMode::mase, std::numbers::e}), WithinAbs(1.0, 1e-15));
  CHECK_THAT(scale_feature({"x", ScaleMode::mase, 1.5}), WithinAbs(0.405465, 1e-6));
}

TEST_CASE("scale modes parse from their flag names", "[preprocess]") {
  CHECK(parse_scale_mode("mase") == ScaleMode::mase);
  CHECK(parse_scale_mode("none") == ScaleMode::none);
  CHECK(parse_scale_mode("mean") == ScaleMode::mean);
  CHECK_THROWS_AS(parse_scale_mode("boxcox"), DomainError);
}
