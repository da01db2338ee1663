#include <catch2/catch_amalgamated.hpp>

#include <globalar/experiment.hpp>

#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace globalar;
using Catch::Matchers::WithinAbs;

namespace {

TrainTestSplit synthetic_split(SyntheticKind kind, std::size_t count, std::size_t length, int horizon,
                               double noise, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.kind = kind;
  spec.count = count;
  spec.length = length;
  spec.horizon = horizon;
  spec.noise_sd = noise;
  spec.seed = seed;
  return split_holdout(gen_synthetic(spec));
}

std::string summary_text(const std::vector<CellResult>& results) {
  std::ostringstream out;
  write_summary(out, results);
  return out.str();
}

std::string per_series_text(const std::vector<CellResult>& results) {
  std::ostringstream out;
  write_per_series(out, results);
  return out.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const CellResult& cell(const std::vector<CellResult>& rs, ModelKind m, std::size_t lag) {
  for (const auto& r : rs)
    if (r.cell.model == m && r.cell.lag == lag) return r;
  throw std::runtime_error("no such cell");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("summary has one row per cell minus failures", "[experiment]") {
  auto split = synthetic_split(SyntheticKind::mixed, 12, 30, 4, 0.3, 1);
  ExperimentSpec spec;
  spec.models = {ModelKind::linear, ModelKind::poly2, ModelKind::naive};
  spec.lags = {1, 2, 3, 60};
  spec.partitions = {1, 3};
  auto cells = cross_cells(spec);
  REQUIRE(cells.size() == 3 * 4 * 2);
  auto results = run_sweep(split, spec, cells);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.error ? 1 : 0;
  // Lag 60 exceeds every training length for both global models and both
  // partition counts.
  CHECK(failed == 4);
  CHECK(lines(summary_text(results)) == 1 + cells.size() - failed);
}

TEST_CASE("sweeps are identical for any thread count", "[experiment]") {
  auto split = synthetic_split(SyntheticKind::mixed, 30, 40, 6, 0.5, 2);
  ExperimentSpec spec;
  spec.models = {ModelKind::linear, ModelKind::poly2, ModelKind::local_ar, ModelKind::theta};
  spec.lags = {1, 2, 3, 4, 5, 6};
  spec.partitions = {1, 5};
  spec.prep.scale_feature = true;
  auto cells = cross_cells(spec);
  spec.threads = 1;
  auto serial = run_sweep(split, spec, cells);
  spec.threads = 4;
  auto threaded = run_sweep(split, spec, cells);
  CHECK(summary_text(serial) == summary_text(threaded));
  CHECK(per_series_text(serial) == per_series_text(threaded));
}

TEST_CASE("seasonal memory becomes expressible at the period", "[experiment]") {
  SyntheticSpec gen;
  gen.kind = SyntheticKind::profile;
  gen.period = 12;
  gen.count = 30;
  gen.length = 72;
  gen.horizon = 6;
  gen.seed = 4;
  auto split = split_holdout(gen_synthetic(gen));
  ExperimentSpec spec;
  spec.models = {ModelKind::linear};
  spec.lags = {11, 12};
  auto rs = run_sweep(split, spec, cross_cells(spec));
  const double m11 = cell(rs, ModelKind::linear, 11).report.mase;
  const double m12 = cell(rs, ModelKind::linear, 12).report.mase;
  CHECK(m12 <= 0.8 * m11);
  CHECK(m12 < 1e-8);
}

TEST_CASE("a quadratic map needs the quadratic basis", "[experiment]") {
  SyntheticSpec gen;
  gen.kind = SyntheticKind::logistic;
  gen.count = 20;
  gen.length = 40;
  gen.seed = 5;
  auto split = split_holdout(gen_synthetic(gen));
  ExperimentSpec spec;
  spec.models = {ModelKind::linear, ModelKind::poly2};
  spec.lags = {1};
  spec.prep.mode = ScaleMode::none;
  auto rs = run_sweep(split, spec, cross_cells(spec));
  CHECK(cell(rs, ModelKind::poly2, 1).report.insample < 1e-8);
  CHECK(cell(rs, ModelKind::linear, 1).report.insample > 0.1);
}

TEST_CASE("feature counts follow the monomial formula", "[experiment]") {
  auto split = synthetic_split(SyntheticKind::ar1, 5, 30, 2, 1.0, 3);
  ExperimentSpec spec;
  spec.models = {ModelKind::linear, ModelKind::poly2, ModelKind::poly3};
  spec.lags = {1, 2, 3, 4, 5};
  auto rs = run_sweep(split, spec, cross_cells(spec));
  std::ostringstream out;
  write_features(out, rs);
  CHECK(lines(out.str()) == 1 + 15);
  for (const auto& r : rs) {
    const int d = poly_degree(r.cell.model);
    const double want = d == 1 ? static_cast<double>(r.cell.lag)
                               : oracle::binomial(static_cast<int>(r.cell.lag) + d, d) - 1;
    CHECK(static_cast<double>(r.n_features) == want);
  }
}

TEST_CASE("local AR and global linear agree on a single series", "[experiment]") {
  auto split = synthetic_split(SyntheticKind::ar1, 1, 80, 5, 1.0, 6);
  ExperimentSpec spec;
  spec.models = {ModelKind::linear, ModelKind::local_ar};
  spec.lags = {1, 2, 3, 4, 5, 6, 7, 8};
  auto rs = run_sweep(split, spec, cross_cells(spec));
  for (auto p : spec.lags) {
    const auto& g = cell(rs, ModelKind::linear, p).report;
    const auto& l = cell(rs, ModelKind::local_ar, p).report;
    CHECK_THAT(g.mase, WithinAbs(l.mase, 1e-10));
    CHECK_THAT(g.insample, WithinAbs(l.insample, 1e-10));
  }
}

TEST_CASE("min-length filter keeps series longer than the lag", "[experiment]") {
  std::vector<TimeSeries> all;
  for (std::size_t n : {8u, 14u, 30u}) {
    TimeSeries s;
    s.id = "len" + std::to_string(n);
    for (std::size_t t = 0; t < n; ++t) s.values.push_back(std::sin(0.7 * static_cast<double>(t * n)));
    s.horizon = 2;
    all.push_back(s);
  }
  auto split = split_holdout(TimeSeriesSet(all));
  CHECK(default_lags(split).back() == 5);
  ExperimentSpec spec;
  spec.models = {ModelKind::linear};
  spec.lags = {4, 10, 20};
  auto strict = run_sweep(split, spec, cross_cells(spec));
  CHECK_FALSE(strict[0].error);
  CHECK(strict[1].error);
  spec.min_length_filter = true;
  auto filtered = run_sweep(split, spec, cross_cells(spec));
  CHECK(filtered[0].n_series == 3);
  CHECK(filtered[1].n_series == 2);
  CHECK(filtered[2].n_series == 1);
  for (const auto& r : filtered) CHECK_FALSE(r.error);
}

TEST_CASE("artifacts and manifest", "[experiment]") {
  auto split = synthetic_split(SyntheticKind::ar1, 6, 25, 3, 1.0, 7);
  ExperimentSpec spec;
  spec.command = "sweep-model";
  spec.models = {ModelKind::linear, ModelKind::poly2};
  spec.lags = {2, 40};
  spec.out_dir = std::filesystem::temp_directory_path() / "globalar_test_artifacts";
  std::filesystem::remove_all(spec.out_dir);
  auto rs = run_sweep(split, spec, cross_cells(spec));
  CHECK(write_artifacts(spec, rs, true) == 2);
  for (const char* f : {"summary.csv", "per_series.csv", "features.csv", "run.json"})
    CHECK(std::filesystem::exists(spec.out_dir / f));
  auto j = nlohmann::json::parse(slurp(spec.out_dir / "run.json"));
  CHECK(j["command"] == "sweep-model");
  CHECK(j["failed_cells"].size() == 2);
  CHECK(j["lags"] == std::vector<std::size_t>{2, 40});
  CHECK(j["scale"] == "mase");

  const auto first = slurp(spec.out_dir / "summary.csv");
  write_artifacts(spec, run_sweep(split, spec, cross_cells(spec)), true);
  CHECK(slurp(spec.out_dir / "summary.csv") == first);
  std::filesystem::remove_all(spec.out_dir);
}

TEST_CASE("coefficient dump", "[experiment]") {
  SECTION("noiseless halving recovers the generator") {
    SyntheticSpec gen;
    gen.kind = SyntheticKind::ar1;
    gen.phi = 0.5;
    gen.count = 3;
    gen.length = 20;
    auto split = split_holdout(gen_synthetic(gen));
    std::ostringstream out;
    coefficient_dump(out, "halving", split.train, {1}, PreprocessSpec{ScaleMode::mase, false, false}, true);
    std::istringstream in(out.str());
    std::string header, intercept, lag1;
    std::getline(in, header);
    std::getline(in, intercept);
    std::getline(in, lag1);
    CHECK(header == "dataset,order,lag,coefficient");
    CHECK(lag1 == "halving,1,1,0.5");
    CHECK(std::abs(std::stod(intercept.substr(intercept.rfind(',') + 1))) < 1e-10);
  }
  SECTION("noisy AR(1) loads the most recent lag") {
    SyntheticSpec gen;
    gen.kind = SyntheticKind::ar1;
    gen.phi = 0.5;
    gen.count = 200;
    gen.length = 50;
    gen.noise_sd = 1.0;
    auto train = split_holdout(gen_synthetic(gen)).train;
    ModelSpec ms;
    ms.lag = 4;
    auto fitted = fit_global(train, ms, PreprocessSpec{});
    const auto& lm = std::get<LinearModel>(fitted.models.front().impl());
    // Columns run oldest to newest.
    CHECK_THAT(lm.weights(3), WithinAbs(0.5, 0.03));
    for (int j = 0; j < 3; ++j) CHECK_THAT(lm.weights(j), WithinAbs(0.0, 0.03));
  }
  SECTION("seasonal profiles load lag 12") {
    SyntheticSpec gen;
    gen.kind = SyntheticKind::profile;
    gen.period = 12;
    gen.count = 30;
    gen.length = 60;
    auto train = split_holdout(gen_synthetic(gen)).train;
    std::ostringstream out;
    coefficient_dump(out, "profile", train, {12, 14}, PreprocessSpec{ScaleMode::mase, false, false}, true);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::map<std::pair<int, int>, double> coef;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string name, order, lag, value;
      std::getline(row, name, ',');
      std::getline(row, order, ',');
      std::getline(row, lag, ',');
      std::getline(row, value, ',');
      coef[{std::stoi(order), std::stoi(lag)}] = std::stod(value);
    }
    CHECK(coef.size() == 13 + 15);
    auto at = [&](int order, int lag) { return coef.at(std::make_pair(order, lag)); };
    CHECK_THAT(at(12, 12), WithinAbs(1.0, 1e-8));
    for (int k = 0; k <= 11; ++k) CHECK_THAT(at(12, k), WithinAbs(0.0, 1e-8));
    for (int k = 1; k <= 14; ++k)
      if (k != 12) CHECK(std::abs(at(14, k)) < std::abs(at(14, 12)));
  }
}
