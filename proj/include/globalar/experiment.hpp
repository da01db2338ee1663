#pragma once

/// @file
/// Sweep runners: every (model, lag, partition count) cell is fit and scored
/// independently on a bounded worker pool, then written in a fixed order.

#include <globalar/dataset.hpp>
#include <globalar/embed.hpp>
#include <globalar/evaluate.hpp>
#include <globalar/parallel.hpp>
#include <globalar/partition.hpp>
#include <globalar/pipeline.hpp>
#include <globalar/report.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace globalar {

struct ExperimentSpec {
  std::string command;
  std::string data_path;
  std::optional<std::string> meta_path;
  std::vector<std::size_t> lags;
  std::vector<ModelKind> models;
  /// Group counts; 0 stands for the atomic partition (one group per series).
  std::vector<std::size_t> partitions{1};
  std::optional<std::string> partition_key;
  std::uint64_t partition_seed = 0;
  PreprocessSpec prep{ScaleMode::mase, false, false};
  bool intercept = true;
  MlpConfig mlp;
  std::size_t feature_cap = default_feature_cap;
  /// Per lag, keep only series whose training part is longer than the lag.
  bool min_length_filter = false;
  std::size_t threads = 1;
  std::filesystem::path out_dir = ".";
  bool per_series = true;
};

struct SweepCell {
  ModelKind model = ModelKind::linear;
  std::size_t lag = 1;
  std::size_t partitions = 1;
};

struct CellResult {
  SweepCell cell;
  EvalReport report;
  std::size_t n_features = 0;
  std::size_t n_series = 0;
  std::optional<std::string> error;
};

inline std::vector<SweepCell> cross_cells(const ExperimentSpec& spec) {
  std::vector<SweepCell> cells;
  for (auto m : spec.models)
    for (auto lag : spec.lags)
      for (auto p : spec.partitions) cells.push_back({m, lag, p});
  return cells;
}

/// Lags 1..(shortest training length - 1).
inline std::vector<std::size_t> default_lags(const TrainTestSplit& split) {
  std::vector<std::size_t> lags;
  for (std::size_t p = 1; p + 1 <= split.train.min_length(); ++p) lags.push_back(p);
  if (lags.empty()) throw StructuralError("no valid lags: a training series has fewer than 2 values");
  return lags;
}

/// Restricts a split to series whose training part is longer than `lag`.
inline TrainTestSplit filter_by_length(const TrainTestSplit& split, std::size_t lag) {
  std::vector<TimeSeries> train;
  std::vector<std::vector<double>> test;
  for (std::size_t i = 0; i < split.train.size(); ++i)
    if (split.train[i].size() > lag) {
      train.push_back(split.train[i]);
      test.push_back(split.test[i]);
    }
  if (train.empty())
    throw StructuralError("no series has a training part longer than lag " + std::to_string(lag));
  return {TimeSeriesSet(std::move(train)), std::move(test)};
}

inline CellResult run_cell(const TrainTestSplit& full, const ExperimentSpec& spec,
                           const SweepCell& cell) {
  CellResult res{cell, {}, 0, 0, std::nullopt};
  try {
    const TrainTestSplit split =
        spec.min_length_filter ? filter_by_length(full, cell.lag) : full;
    res.n_series = split.train.size();
    ModelSpec ms{cell.model, cell.lag, spec.intercept, spec.mlp, spec.feature_cap};
    std::size_t groups = 1;
    FittedSet fitted;
    if (!is_global(cell.model)) {
      fitted = fit_local(split.train, ms, spec.prep);
      groups = split.train.size();
    } else {
      std::optional<Partition> part;
      if (spec.partition_key)
        part = keyed_partition(split.train, *spec.partition_key);
      else if (cell.partitions != 1)
        part = random_partition(split.train,
                                cell.partitions == 0 ? split.train.size() : cell.partitions,
                                spec.partition_seed);
      if (part) {
        fitted = fit_partitioned(split.train, *part, ms, spec.prep);
        groups = part->groups;
      } else {
        fitted = fit_global(split.train, ms, spec.prep);
      }
      res.n_features = feature_count(
          cell.lag, FeatureMap{poly_degree(cell.model), spec.prep.scale_feature ? 1u : 0u});
    }
    res.report = evaluate(fitted, split, spec.prep.seasonal);
    res.report.partitions = groups;
  } catch (const Error& e) {
    res.error = e.what();
  }
  res.report.model = std::string(to_string(cell.model));
  res.report.lag = cell.lag;
  return res;
}

/// Runs every cell; results keep the order of `cells`.
inline std::vector<CellResult> run_sweep(const TrainTestSplit& split, const ExperimentSpec& spec,
                                         const std::vector<SweepCell>& cells) {
  std::vector<CellResult> out(cells.size());
  parallel_for(cells.size(), spec.threads,
               [&](std::size_t i) { out[i] = run_cell(split, spec, cells[i]); });
  return out;
}

inline void write_summary(std::ostream& out, const std::vector<CellResult>& results) {
  out << summary_header << '\n';
  for (const auto& r : results)
    if (!r.error) write_summary_row(out, r.report);
}

inline void write_per_series(std::ostream& out, const std::vector<CellResult>& results) {
  out << per_series_header << '\n';
  for (const auto& r : results)
    if (!r.error) write_per_series_rows(out, r.report);
}

inline void write_features(std::ostream& out, const std::vector<CellResult>& results) {
  out << "model,lag,n_features\n";
  for (const auto& r : results)
    if (!r.error && is_global(r.cell.model))
      out << to_string(r.cell.model) << ',' << r.cell.lag << ',' << r.n_features << '\n';
}

inline nlohmann::json manifest(const ExperimentSpec& spec, const std::vector<CellResult>& results,
                               const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["tool"] = "globalar";
#ifdef GLOBALAR_VERSION
  j["version"] = GLOBALAR_VERSION;
#endif
  j["command"] = spec.command;
  j["data"] = spec.data_path;
  j["meta"] = spec.meta_path ? nlohmann::json(*spec.meta_path) : nlohmann::json(nullptr);
  j["lags"] = spec.lags;
  std::vector<std::string> models;
  for (auto m : spec.models) models.emplace_back(to_string(m));
  j["models"] = models;
  j["partitions"] = spec.partitions;
  j["partition_key"] = spec.partition_key ? nlohmann::json(*spec.partition_key) : nlohmann::json(nullptr);
  j["partition_seed"] = spec.partition_seed;
  j["scale"] = std::string(to_string(spec.prep.mode));
  j["seasonal_scale"] = spec.prep.seasonal;
  j["scale_feature"] = spec.prep.scale_feature;
  j["intercept"] = spec.intercept;
  j["min_length_filter"] = spec.min_length_filter;
  j["feature_cap"] = spec.feature_cap;
  j["mlp"] = {{"layers", spec.mlp.layers},       {"width", spec.mlp.width},
              {"learning_rate", spec.mlp.learning_rate},
              {"batch_size", spec.mlp.batch_size}, {"validation_fraction", spec.mlp.validation_fraction},
              {"patience", spec.mlp.patience},   {"max_epochs", spec.mlp.max_epochs},
              {"seed", spec.mlp.seed}};
  j["threads"] = spec.threads;
  j["outputs"] = outputs;
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : results)
    if (r.error)
      failed.push_back({{"model", std::string(to_string(r.cell.model))},
                        {"lag", r.cell.lag},
                        {"partitions", r.cell.partitions},
                        {"error", *r.error}});
  j["failed_cells"] = failed;
  return j;
}

/// Writes summary.csv, per_series.csv (optional), features.csv (when
/// requested) and run.json under spec.out_dir. Returns the number of failed cells.
inline std::size_t write_artifacts(const ExperimentSpec& spec,
                                   const std::vector<CellResult>& results, bool with_features) {
  std::filesystem::create_directories(spec.out_dir);
  std::vector<std::string> outputs;
  auto open = [&](const std::string& name) {
    std::ofstream f(spec.out_dir / name, std::ios::binary);
    if (!f) throw Error("cannot write '" + (spec.out_dir / name).string() + "'");
    outputs.push_back(name);
    return f;
  };
  {
    auto f = open("summary.csv");
    write_summary(f, results);
  }
  if (spec.per_series) {
    auto f = open("per_series.csv");
    write_per_series(f, results);
  }
  if (with_features) {
    auto f = open("features.csv");
    write_features(f, results);
  }
  outputs.push_back("run.json");
  {
    std::ofstream f(spec.out_dir / "run.json", std::ios::binary);
    if (!f) throw Error("cannot write run.json");
    f << manifest(spec, results, outputs).dump(2) << '\n';
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.error ? 1 : 0;
  return failed;
}

/// Global linear coefficients per lag: one row per lag coefficient
/// (lag k weighs the value k steps back) plus the intercept as lag 0.
inline void coefficient_dump(std::ostream& out, const std::string& dataset,
                             const TimeSeriesSet& train, const std::vector<std::size_t>& lags,
                             const PreprocessSpec& prep, bool intercept) {
  out << "dataset,order,lag,coefficient\n";
  for (auto p : lags) {
    ModelSpec ms;
    ms.kind = ModelKind::linear;
    ms.lag = p;
    ms.intercept = intercept;
    auto fitted = fit_global(train, ms, prep);
    const auto& lm = std::get<LinearModel>(fitted.models.front().impl());
    out << dataset << ',' << p << ",0," << format10(lm.intercept) << '\n';
    for (std::size_t j = 0; j < p; ++j)
      out << dataset << ',' << p << ',' << p - j << ','
          << format10(lm.weights(static_cast<Eigen::Index>(j))) << '\n';
    for (Eigen::Index e = static_cast<Eigen::Index>(p); e < lm.weights.size(); ++e)
      out << dataset << ',' << p << ",extra" << e - static_cast<Eigen::Index>(p) + 1 << ','
          << format10(lm.weights(e)) << '\n';
  }
}

}  // namespace globalar
