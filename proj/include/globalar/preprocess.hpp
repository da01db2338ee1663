#pragma once

/// @file
/// Per-series scale normalization. Dividing a series by its in-sample mean
/// absolute (seasonal) difference makes the absolute error of the scaled data
/// coincide with MASE on the original data.

#include <globalar/dataset.hpp>
#include <globalar/error.hpp>

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace globalar {

enum class ScaleMode { none, mase, mean };

inline std::string_view to_string(ScaleMode m) {
  switch (m) {
    case ScaleMode::none: return "none";
    case ScaleMode::mase: return "mase";
    case ScaleMode::mean: return "mean";
  }
  return "?";
}

inline ScaleMode parse_scale_mode(std::string_view s) {
  if (s == "none") return ScaleMode::none;
  if (s == "mase") return ScaleMode::mase;
  if (s == "mean") return ScaleMode::mean;
  throw DomainError("unknown scale mode '" + std::string(s) + "'");
}

struct ScaleRecord {
  std::string series_id;
  ScaleMode mode = ScaleMode::none;
  double scale = 1.0;
};

/// Difference lag used by the MASE denominator of a series.
inline std::size_t mase_lag(const TimeSeries& s, bool seasonal) {
  return seasonal && s.season_period > 1 ? static_cast<std::size_t>(s.season_period) : 1;
}

/// Mean of |v[t] - v[t-lag]| over t = lag..n-1, summed in index order.
/// Throws DegenerateScaleError when the series is too short or the mean is 0.
inline double mean_abs_difference(std::span<const double> v, std::size_t lag) {
  if (lag < 1 || v.size() <= lag)
    throw DegenerateScaleError("need more than " + std::to_string(lag) +
                               " values for a lag-" + std::to_string(lag) + " difference");
  double sum = 0.0;
  for (std::size_t t = lag; t < v.size(); ++t) sum += std::abs(v[t] - v[t - lag]);
  double d = sum / static_cast<double>(v.size() - lag);
  if (!(d > 0.0)) throw DegenerateScaleError("mean absolute difference is zero");
  return d;
}

inline ScaleRecord fit_scale(const TimeSeries& train, ScaleMode mode, bool seasonal = false) {
  ScaleRecord r{train.id, mode, 1.0};
  switch (mode) {
    case ScaleMode::none: break;
    case ScaleMode::mase:
      try {
        r.scale = mean_abs_difference(train.values, mase_lag(train, seasonal));
      } catch (const DegenerateScaleError& e) {
        throw DegenerateScaleError("series '" + train.id + "': " + e.what());
      }
      break;
    case ScaleMode::mean: {
      if (train.values.empty()) throw DegenerateScaleError("series '" + train.id + "' is empty");
      double sum = 0.0;
      for (double v : train.values) sum += std::abs(v);
      r.scale = sum / static_cast<double>(train.size());
      if (!(r.scale > 0.0))
        throw DegenerateScaleError("series '" + train.id + "' has zero mean absolute value");
      break;
    }
  }
  return r;
}

inline TimeSeries apply_scale(const TimeSeries& series, const ScaleRecord& record) {
  if (series.id != record.series_id)
    throw DomainError("scale record for '" + record.series_id + "' applied to '" + series.id +
                      "'");
  TimeSeries out = series;
  for (double& v : out.values) v /= record.scale;
  return out;
}

inline std::vector<double> apply_scale(std::span<const double> values, const ScaleRecord& record) {
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= record.scale;
  return out;
}

inline std::vector<double> invert_scale(std::span<const double> forecast,
                                        const ScaleRecord& record) {
  std::vector<double> out(forecast.begin(), forecast.end());
  for (double& v : out) v *= record.scale;
  return out;
}

/// log(scale), appended as a constant design column for the series.
inline double scale_feature(const ScaleRecord& record) { return std::log(record.scale); }

}  // namespace globalar
