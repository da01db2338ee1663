#pragma once

/// @file
/// Fitting a model specification to a set of training series: per-series
/// scaling, pooled embedding, featurization and estimation. A FittedSet maps
/// every series to the model that forecasts it (one model for a global fit,
/// one per group for a partitioned fit, one per series for a local fit).

#include <globalar/dataset.hpp>
#include <globalar/embed.hpp>
#include <globalar/error.hpp>
#include <globalar/models.hpp>
#include <globalar/parallel.hpp>
#include <globalar/preprocess.hpp>

#include <map>
#include <string>
#include <vector>

namespace globalar {

struct ModelSpec {
  ModelKind kind = ModelKind::linear;
  std::size_t lag = 1;
  bool intercept = true;
  MlpConfig mlp;
  std::size_t feature_cap = default_feature_cap;
};

struct PreprocessSpec {
  ScaleMode mode = ScaleMode::none;
  bool seasonal = false;       ///< seasonal differences in the MASE denominator
  bool scale_feature = false;  ///< append log(scale) as a constant column
};

struct FittedSet {
  std::vector<FittedModel> models;
  std::map<std::string, std::size_t> model_of;
  std::map<std::string, ScaleRecord> scales;
  SeriesExtras extras;
  /// Series that could not be prepared for fitting, with the reason.
  std::map<std::string, std::string> failures;
  /// Series whose local AR fit fell back to the naive forecast.
  std::map<std::string, std::string> fallbacks;

  bool covers(const std::string& id) const { return model_of.count(id) != 0; }
  const FittedModel& model_for(const std::string& id) const {
    auto it = model_of.find(id);
    if (it == model_of.end()) throw StructuralError("no fitted model for series '" + id + "'");
    return models[it->second];
  }
  std::span<const double> extras_for(const std::string& id) const {
    auto it = extras.find(id);
    return it == extras.end() ? std::span<const double>{} : std::span<const double>(it->second);
  }
};

namespace detail {

struct Prepared {
  std::vector<TimeSeries> scaled;
  std::map<std::string, ScaleRecord> scales;
  SeriesExtras extras;
  std::map<std::string, std::string> failures;
};

inline Prepared prepare(const TimeSeriesSet& train, const PreprocessSpec& prep) {
  Prepared out;
  for (const auto& s : train) {
    try {
      auto rec = fit_scale(s, prep.mode, prep.seasonal);
      out.scaled.push_back(apply_scale(s, rec));
      if (prep.scale_feature) out.extras[s.id] = {scale_feature(rec)};
      out.scales.emplace(s.id, std::move(rec));
    } catch (const DegenerateScaleError& e) {
      out.failures.emplace(s.id, e.what());
    }
  }
  return out;
}

inline FittedModel fit_pooled(const std::vector<TimeSeries>& scaled, const SeriesExtras& extras,
                              const ModelSpec& spec, bool with_extras) {
  DesignMatrix m = embed_set(TimeSeriesSet(scaled), spec.lag);
  if (const int d = poly_degree(spec.kind); d > 1) m = expand_poly(m, d, spec.feature_cap);
  if (with_extras) m = append_constant_columns(m, extras);
  if (spec.kind == ModelKind::mlp) return fit_mlp(m, spec.mlp);
  return fit_linear(m, spec.intercept);
}

}  // namespace detail

/// One global model over the pooled embedding of every series in `train`.
/// Series whose scale is degenerate are left out and listed in `failures`.
inline FittedSet fit_global(const TimeSeriesSet& train, const ModelSpec& spec,
                            const PreprocessSpec& prep) {
  if (!is_global(spec.kind))
    throw DomainError(std::string(to_string(spec.kind)) + " is not a global model");
  auto p = detail::prepare(train, prep);
  if (p.scaled.empty()) throw StructuralError("no series survived preprocessing");
  FittedSet out;
  out.models.push_back(detail::fit_pooled(p.scaled, p.extras, spec, prep.scale_feature));
  for (const auto& s : p.scaled) out.model_of.emplace(s.id, 0);
  out.scales = std::move(p.scales);
  out.extras = std::move(p.extras);
  out.failures = std::move(p.failures);
  return out;
}

/// One model per series. Naive, seasonal naive and theta work on the raw
/// values; local AR uses the same scaling as global fits and falls back to the
/// naive forecast when a series is too short for its order.
inline FittedSet fit_local(const TimeSeriesSet& train, const ModelSpec& spec,
                           const PreprocessSpec& prep) {
  if (is_global(spec.kind))
    throw DomainError(std::string(to_string(spec.kind)) + " is not a local model");
  FittedSet out;
  if (spec.kind != ModelKind::local_ar) {
    for (const auto& s : train) {
      try {
        FittedModel m = spec.kind == ModelKind::naive    ? fit_naive()
                        : spec.kind == ModelKind::snaive ? fit_snaive(s)
                                                         : fit_theta(s);
        out.model_of.emplace(s.id, out.models.size());
        out.models.push_back(std::move(m));
        out.scales.emplace(s.id, ScaleRecord{s.id, ScaleMode::none, 1.0});
      } catch (const InsufficientDataError& e) {
        out.failures.emplace(s.id, e.what());
      }
    }
    return out;
  }

  PreprocessSpec local_prep = prep;
  local_prep.scale_feature = false;  // a constant column is collinear with a local intercept
  auto p = detail::prepare(train, local_prep);
  for (const auto& s : p.scaled) {
    out.model_of.emplace(s.id, out.models.size());
    try {
      out.models.push_back(fit_local_ar(s, spec.lag, spec.intercept));
    } catch (const InsufficientDataError& e) {
      out.models.push_back(fit_naive());
      out.fallbacks.emplace(s.id, e.what());
    }
  }
  out.scales = std::move(p.scales);
  out.failures = std::move(p.failures);
  return out;
}

inline FittedSet fit(const TimeSeriesSet& train, const ModelSpec& spec,
                     const PreprocessSpec& prep) {
  return is_global(spec.kind) ? fit_global(train, spec, prep) : fit_local(train, spec, prep);
}

}  // namespace globalar
