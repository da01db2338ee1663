#pragma once

/// @file
/// One-step-ahead predictors behind a single contract: pooled (global) linear,
/// polynomial and network autoregressions, and the local baselines naive,
/// seasonal naive, per-series linear AR and theta.

#include <globalar/dataset.hpp>
#include <globalar/embed.hpp>
#include <globalar/error.hpp>
#include <globalar/least_squares.hpp>
#include <globalar/mlp.hpp>

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace globalar {

enum class ModelKind { linear, poly2, poly3, mlp, naive, snaive, theta, local_ar };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::linear: return "linear";
    case ModelKind::poly2: return "poly2";
    case ModelKind::poly3: return "poly3";
    case ModelKind::mlp: return "mlp";
    case ModelKind::naive: return "naive";
    case ModelKind::snaive: return "snaive";
    case ModelKind::theta: return "theta";
    case ModelKind::local_ar: return "local-ar";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::linear, ModelKind::poly2, ModelKind::poly3, ModelKind::mlp,
                 ModelKind::naive, ModelKind::snaive, ModelKind::theta, ModelKind::local_ar})
    if (to_string(k) == s) return k;
  throw DomainError("unknown model '" + std::string(s) + "'");
}

/// Global models are fit on the pooled embedding of a whole set (or group).
inline bool is_global(ModelKind k) {
  return k == ModelKind::linear || k == ModelKind::poly2 || k == ModelKind::poly3 ||
         k == ModelKind::mlp;
}

inline int poly_degree(ModelKind k) {
  return k == ModelKind::poly2 ? 2 : k == ModelKind::poly3 ? 3 : 1;
}

struct LinearModel {
  FeatureMap map;
  std::size_t order = 0;
  bool has_intercept = true;
  double intercept = 0.0;
  Eigen::VectorXd weights;
  bool rank_deficient = false;
};

struct MlpModel {
  FeatureMap map;
  std::size_t order = 0;
  Mlp net;
  TrainingMeta meta;
};

struct NaiveModel {};

struct SeasonalNaiveModel {
  std::size_t period = 1;
};

struct ThetaModel {
  double level = 0.0;
  double drift = 0.0;
  double alpha = 1.0;
};

/// Immutable trained predictor.
class FittedModel {
public:
  using Impl = std::variant<LinearModel, MlpModel, NaiveModel, SeasonalNaiveModel, ThetaModel>;

  FittedModel(ModelKind kind, Impl impl) : kind_(kind), impl_(std::move(impl)) {}

  ModelKind kind() const noexcept { return kind_; }
  const Impl& impl() const noexcept { return impl_; }

  /// Memory p consumed by the model; 0 for naive, seasonal naive and theta.
  std::size_t order() const {
    if (auto* l = std::get_if<LinearModel>(&impl_)) return l->order;
    if (auto* m = std::get_if<MlpModel>(&impl_)) return m->order;
    return 0;
  }

  /// Shortest history predict_one accepts.
  std::size_t min_window() const {
    if (auto* s = std::get_if<SeasonalNaiveModel>(&impl_)) return s->period;
    if (std::holds_alternative<NaiveModel>(impl_)) return 1;
    return order();
  }

  std::size_t extras() const {
    if (auto* l = std::get_if<LinearModel>(&impl_)) return l->map.n_extras;
    if (auto* m = std::get_if<MlpModel>(&impl_)) return m->map.n_extras;
    return 0;
  }

  bool rank_deficient() const {
    auto* l = std::get_if<LinearModel>(&impl_);
    return l && l->rank_deficient;
  }

  /// One-step prediction from the most recent window (oldest value first).
  /// Fixed-order models need exactly order() values; naive needs >= 1 and
  /// seasonal naive >= period. Theta ignores the window.
  double predict_one(std::span<const double> window, std::span<const double> extras = {}) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LinearModel>) {
            check_exact(window.size(), m.order);
            auto x = featurize(window, m.map, extras);
            double acc = m.intercept;
            for (std::size_t j = 0; j < x.size(); ++j) acc += m.weights(static_cast<Eigen::Index>(j)) * x[j];
            return acc;
          } else if constexpr (std::is_same_v<T, MlpModel>) {
            check_exact(window.size(), m.order);
            auto x = featurize(window, m.map, extras);
            return m.net.predict_one(Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
          } else if constexpr (std::is_same_v<T, NaiveModel>) {
            if (window.empty()) throw DomainError("naive forecast needs a non-empty window");
            return window.back();
          } else if constexpr (std::is_same_v<T, SeasonalNaiveModel>) {
            if (window.size() < m.period)
              throw DomainError("seasonal naive needs a window of at least " +
                                std::to_string(m.period) + " values, got " +
                                std::to_string(window.size()));
            return window[window.size() - m.period];
          } else {
            return m.level + m.drift;
          }
        },
        impl_);
  }

private:
  static void check_exact(std::size_t got, std::size_t want) {
    if (got != want)
      throw DomainError("window of length " + std::to_string(got) + " given to a model of order " +
                        std::to_string(want));
  }

  ModelKind kind_;
  Impl impl_;
};

/// Least squares on the design matrix; minimum-norm (flagged) when rank
/// deficient. The kind follows the matrix's polynomial degree.
inline FittedModel fit_linear(const DesignMatrix& m, bool intercept = true) {
  auto sol = solve_least_squares(m.features, m.targets, intercept);
  LinearModel lm;
  lm.map = m.feature_map;
  lm.order = m.order;
  lm.has_intercept = intercept;
  lm.intercept = sol.intercept;
  lm.weights = std::move(sol.weights);
  lm.rank_deficient = sol.rank_deficient;
  const ModelKind kind = m.feature_map.degree == 2   ? ModelKind::poly2
                         : m.feature_map.degree == 3 ? ModelKind::poly3
                                                     : ModelKind::linear;
  return FittedModel(kind, std::move(lm));
}

inline FittedModel fit_mlp(const DesignMatrix& m, const MlpConfig& config) {
  auto fit = train_mlp(m.features, m.targets, config);
  MlpModel mm{m.feature_map, m.order, std::move(fit.net), fit.meta};
  return FittedModel(ModelKind::mlp, std::move(mm));
}

/// Linear AR fit on a single series. Requires more than 2p observations.
inline FittedModel fit_local_ar(const TimeSeries& series, std::size_t p, bool intercept = true) {
  if (series.size() <= 2 * p)
    throw InsufficientDataError("series '" + series.id + "' of length " +
                                std::to_string(series.size()) + " is too short for a local AR(" +
                                std::to_string(p) + ") (needs more than " +
                                std::to_string(2 * p) + ")");
  auto m = fit_linear(embed_series(series, p), intercept);
  return FittedModel(ModelKind::local_ar, std::get<LinearModel>(m.impl()));
}

inline FittedModel fit_naive() { return FittedModel(ModelKind::naive, NaiveModel{}); }

inline FittedModel fit_snaive(const TimeSeries& series) {
  return FittedModel(ModelKind::snaive,
                     SeasonalNaiveModel{static_cast<std::size_t>(series.season_period)});
}

namespace detail {

/// Simple exponential smoothing started at the first value. Returns the
/// in-sample one-step squared error; `level` receives the terminal level.
inline double ses_sse(std::span<const double> v, double alpha, double& level) {
  level = v[0];
  double sse = 0.0;
  for (std::size_t t = 1; t < v.size(); ++t) {
    const double e = v[t] - level;
    sse += e * e;
    level = alpha * v[t] + (1.0 - alpha) * level;
  }
  return sse;
}

}  // namespace detail

/// Theta method as exponential smoothing plus drift: drift is half the
/// least-squares slope of the values on 0..n-1; the smoothing constant is the
/// first minimizer of in-sample squared error on the grid 0.01, 0.02, ..., 1.
inline FittedModel fit_theta(const TimeSeries& series) {
  const auto& v = series.values;
  if (v.size() < 3)
    throw InsufficientDataError("series '" + series.id + "' needs at least 3 values for theta");
  const double n = static_cast<double>(v.size());
  const double t_mean = (n - 1.0) / 2.0;
  double v_mean = 0.0;
  for (double x : v) v_mean += x;
  v_mean /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    sxy += dt * (v[t] - v_mean);
    sxx += dt * dt;
  }
  ThetaModel m;
  m.drift = sxy / sxx / 2.0;

  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 100; ++k) {
    const double alpha = k / 100.0;
    double level = 0.0;
    const double sse = detail::ses_sse(v, alpha, level);
    if (sse < best_sse) {
      best_sse = sse;
      m.alpha = alpha;
      m.level = level;
    }
  }
  return FittedModel(ModelKind::theta, m);
}

/// Theta's in-sample one-step predictions for t = 1..n-1.
inline std::vector<double> theta_fitted(const ThetaModel& m, std::span<const double> v) {
  std::vector<double> out;
  if (v.empty()) return out;
  double level = v[0];
  for (std::size_t t = 1; t < v.size(); ++t) {
    out.push_back(level + m.drift);
    level = m.alpha * v[t] + (1.0 - m.alpha) * level;
  }
  return out;
}

}  // namespace globalar
