#pragma once

/// @file
/// Recursive multi-step forecasting, point-forecast metrics, and reports that
/// contrast in-sample with out-of-sample one-step error.

#include <globalar/dataset.hpp>
#include <globalar/error.hpp>
#include <globalar/models.hpp>
#include <globalar/pipeline.hpp>
#include <globalar/preprocess.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace globalar {

/// H-step forecast of a series from its (raw) training values. Step 1 uses
/// the last observed window; later steps feed earlier predictions back in.
/// Prediction happens on the scaled series and is inverted at the end.
inline std::vector<double> forecast_recursive(const FittedModel& model,
                                              std::span<const double> train, std::size_t horizon,
                                              const ScaleRecord& record,
                                              std::span<const double> extras = {}) {
  std::vector<double> out;
  out.reserve(horizon);
  if (auto* theta = std::get_if<ThetaModel>(&model.impl())) {
    for (std::size_t h = 1; h <= horizon; ++h)
      out.push_back(theta->level + static_cast<double>(h) * theta->drift);
  } else {
    const std::size_t w = model.min_window();
    if (train.size() < w)
      throw InsufficientDataError("series '" + record.series_id + "' has " +
                                  std::to_string(train.size()) +
                                  " values, the model needs a window of " + std::to_string(w));
    std::vector<double> history = apply_scale(train, record);
    history.reserve(history.size() + horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
      std::span<const double> window(history.data() + history.size() - w, w);
      const double next = model.predict_one(window, extras);
      if (!std::isfinite(next)) throw InstabilityError(record.series_id, h);
      history.push_back(next);
      out.push_back(next);
    }
  }
  out = invert_scale(out, record);
  for (std::size_t h = 0; h < out.size(); ++h)
    if (!std::isfinite(out[h])) throw InstabilityError(record.series_id, h + 1);
  return out;
}

/// One-step in-sample predictions (raw units) with the observations they
/// target, for every training position the model can predict.
struct InSample {
  std::vector<double> predicted;
  std::vector<double> actual;
};

inline InSample insample_predictions(const FittedModel& model, std::span<const double> train,
                                     const ScaleRecord& record,
                                     std::span<const double> extras = {}) {
  InSample out;
  if (auto* theta = std::get_if<ThetaModel>(&model.impl())) {
    const auto scaled = apply_scale(train, record);
    out.predicted = invert_scale(theta_fitted(*theta, scaled), record);
    out.actual.assign(train.begin() + 1, train.end());
    return out;
  }
  const std::size_t w = std::max<std::size_t>(model.min_window(), 1);
  if (train.size() <= w)
    throw InsufficientDataError("series '" + record.series_id +
                                "' has no in-sample rows for the model");
  const auto scaled = apply_scale(train, record);
  std::vector<double> preds;
  for (std::size_t t = w; t < scaled.size(); ++t)
    preds.push_back(model.predict_one(std::span<const double>(scaled.data() + t - w, w), extras));
  out.predicted = invert_scale(preds, record);
  out.actual.assign(train.begin() + static_cast<std::ptrdiff_t>(w), train.end());
  return out;
}

/// mean|forecast - actual| / mean|train[t] - train[t-lag]|.
inline double mase(std::span<const double> forecast, std::span<const double> actual,
                   std::span<const double> train, std::size_t lag = 1) {
  if (forecast.size() != actual.size() || forecast.empty())
    throw DomainError("mase needs equal, non-empty forecast and actual lengths");
  const double denom = mean_abs_difference(train, lag);
  double sum = 0.0;
  for (std::size_t h = 0; h < forecast.size(); ++h) sum += std::abs(forecast[h] - actual[h]);
  return sum / static_cast<double>(forecast.size()) / denom;
}

/// Mean of 200|f - a| / (|f| + |a|), with 0/0 terms counted as 0.
inline double smape(std::span<const double> forecast, std::span<const double> actual) {
  if (forecast.size() != actual.size() || forecast.empty())
    throw DomainError("smape needs equal, non-empty forecast and actual lengths");
  double sum = 0.0;
  for (std::size_t h = 0; h < forecast.size(); ++h) {
    const double den = std::abs(forecast[h]) + std::abs(actual[h]);
    if (den > 0.0) sum += 200.0 * std::min(1.0, std::abs(forecast[h] - actual[h]) / den);
  }
  return sum / static_cast<double>(forecast.size());
}

inline double mae(std::span<const double> forecast, std::span<const double> actual) {
  if (forecast.size() != actual.size() || forecast.empty())
    throw DomainError("mae needs equal, non-empty forecast and actual lengths");
  double sum = 0.0;
  for (std::size_t h = 0; h < forecast.size(); ++h) sum += std::abs(forecast[h] - actual[h]);
  return sum / static_cast<double>(forecast.size());
}

struct SeriesEval {
  std::vector<double> forecasts;
  std::vector<double> actual;
  double mase = 0.0;
  double smape = 0.0;
  double mae = 0.0;
  double insample_mase = 0.0;
  double outsample_onestep_mase = 0.0;
};

struct EvalReport {
  std::string model;
  std::size_t lag = 0;
  std::size_t partitions = 1;
  std::map<std::string, SeriesEval> per_series;
  /// Series excluded from the aggregates, with the reason.
  std::map<std::string, std::string> failures;
  std::map<std::string, std::string> fallbacks;
  double mase = std::numeric_limits<double>::quiet_NaN();
  double smape = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
  double insample = std::numeric_limits<double>::quiet_NaN();
  double outsample_onestep = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  /// Set when the model could not be fit at all.
  std::optional<std::string> error;
};

/// Means of the per-series fields over the series that evaluated cleanly,
/// folded in series-id order.
inline void aggregate(EvalReport& r) {
  if (r.per_series.empty()) return;
  double m = 0, s = 0, a = 0, in = 0, out = 0;
  for (const auto& [_, e] : r.per_series) {
    m += e.mase;
    s += e.smape;
    a += e.mae;
    in += e.insample_mase;
    out += e.outsample_onestep_mase;
  }
  const double n = static_cast<double>(r.per_series.size());
  r.mase = m / n;
  r.smape = s / n;
  r.mae = a / n;
  r.insample = in / n;
  r.outsample_onestep = out / n;
  r.gap = r.outsample_onestep - r.insample;
}

/// Scores a fitted set on a holdout split. `seasonal` selects the seasonal
/// difference lag of each series for the MASE denominator.
inline EvalReport evaluate(const FittedSet& fitted, const TrainTestSplit& split,
                           bool seasonal = false) {
  EvalReport r;
  r.fallbacks = fitted.fallbacks;
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    const auto& s = split.train[i];
    const auto& test = split.test[i];
    if (auto f = fitted.failures.find(s.id); f != fitted.failures.end()) {
      r.failures.emplace(s.id, f->second);
      continue;
    }
    if (!fitted.covers(s.id)) {
      r.failures.emplace(s.id, "no fitted model");
      continue;
    }
    try {
      const auto& model = fitted.model_for(s.id);
      const auto& record = fitted.scales.at(s.id);
      const auto extras = fitted.extras_for(s.id);
      const std::size_t lag = mase_lag(s, seasonal);
      SeriesEval e;
      e.forecasts = forecast_recursive(model, s.values, test.size(), record, extras);
      e.actual = test;
      e.mase = mase(e.forecasts, test, s.values, lag);
      e.smape = smape(e.forecasts, test);
      e.mae = mae(e.forecasts, test);
      const auto ins = insample_predictions(model, s.values, record, extras);
      for (double v : ins.predicted)
        if (!std::isfinite(v)) throw InstabilityError(s.id, 0);
      e.insample_mase = mase(ins.predicted, ins.actual, s.values, lag);
      e.outsample_onestep_mase = mase(std::span(e.forecasts).first(1),
                                      std::span(test).first(1), s.values, lag);
      r.per_series.emplace(s.id, std::move(e));
    } catch (const Error& e) {
      r.failures.emplace(s.id, e.what());
    }
  }
  aggregate(r);
  return r;
}

using FitProcedure = std::function<FittedSet(const TimeSeriesSet&)>;

/// Fits and scores each named procedure on the split. A procedure that fails
/// to fit yields a report carrying the error; the others still run.
inline std::vector<EvalReport> gap_report(
    const std::vector<std::pair<std::string, FitProcedure>>& models, const TrainTestSplit& split,
    std::size_t lag, bool seasonal = false) {
  std::vector<EvalReport> out;
  for (const auto& [name, procedure] : models) {
    EvalReport r;
    try {
      r = evaluate(procedure(split.train), split, seasonal);
    } catch (const Error& e) {
      r.error = e.what();
    }
    r.model = name;
    r.lag = lag;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace globalar
