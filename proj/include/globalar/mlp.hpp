#pragma once

/// @file
/// Rectifier multilayer perceptron with a linear scalar output, trained on
/// mean absolute error by Adam with early stopping on a held-out fraction of
/// the rows.

#include <globalar/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace globalar {

struct MlpConfig {
  int layers = 5;  ///< hidden rectifier layers
  int width = 32;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::size_t batch_size = 1024;
  double validation_fraction = 0.15;
  std::size_t patience = 20;
  std::size_t max_epochs = 500;
  std::uint64_t seed = 0;

  void validate() const {
    if (layers < 1 || width < 1) throw DomainError("MLP needs at least one hidden unit");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
      throw DomainError("validation_fraction must lie in (0, 1)");
    if (batch_size < 1) throw DomainError("batch_size must be >= 1");
    if (patience < 1 || max_epochs < 1) throw DomainError("patience and max_epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  }
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
};

class Mlp {
public:
  Mlp() = default;

  /// Glorot-uniform weights, zero biases.
  Mlp(Eigen::Index inputs, const MlpConfig& config, std::mt19937_64& rng) {
    Eigen::Index fan_in = inputs;
    for (int l = 0; l <= config.layers; ++l) {
      const Eigen::Index fan_out = l == config.layers ? 1 : config.width;
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> unif(-limit, limit);
      Eigen::MatrixXd w(fan_out, fan_in);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = unif(rng);
      weights_.push_back(std::move(w));
      biases_.push_back(Eigen::VectorXd::Zero(fan_out));
      fan_in = fan_out;
    }
  }

  Eigen::Index inputs() const { return weights_.empty() ? 0 : weights_.front().cols(); }
  std::size_t layer_count() const { return weights_.size(); }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  /// One output per row of `X`.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd a = X;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd z = (a * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      a = l + 1 < weights_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a.col(0);
  }

  double predict_one(const Eigen::RowVectorXd& x) const {
    Eigen::MatrixXd X = x;
    return predict(X)(0);
  }

  /// Mean absolute error over the rows of (X, y).
  double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
    return (predict(X) - y).cwiseAbs().mean();
  }

  /// Mean absolute error and its gradient, flattened in parameters() order.
  double loss_and_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           Eigen::VectorXd& grad) const {
    const std::size_t L = weights_.size();
    std::vector<Eigen::MatrixXd> acts(L + 1), pre(L);
    acts[0] = X;
    for (std::size_t l = 0; l < L; ++l) {
      pre[l] = (acts[l] * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      acts[l + 1] = l + 1 < L ? Eigen::MatrixXd(pre[l].cwiseMax(0.0)) : pre[l];
    }
    const Eigen::VectorXd resid = acts[L].col(0) - y;
    const double n = static_cast<double>(X.rows());
    // d|r|/dr = sign(r), with sign(0) = 0.
    Eigen::MatrixXd delta = resid.unaryExpr([](double r) {
      return static_cast<double>((r > 0.0) - (r < 0.0));
    }) / n;

    grad.resize(parameter_count());
    std::vector<Eigen::Index> offs = offsets();
    for (std::size_t l = L; l-- > 0;) {
      const Eigen::MatrixXd gw = delta.transpose() * acts[l];
      const Eigen::VectorXd gb = delta.colwise().sum().transpose();
      Eigen::Map<Eigen::MatrixXd>(grad.data() + offs[2 * l], gw.rows(), gw.cols()) = gw;
      grad.segment(offs[2 * l + 1], gb.size()) = gb;
      if (l > 0) {
        delta = (delta * weights_[l]).cwiseProduct(
            pre[l - 1].unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));
      }
    }
    return resid.cwiseAbs().mean();
  }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  /// Layer by layer: weights (column-major), then biases.
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd p(parameter_count());
    auto offs = offsets();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      p.segment(offs[2 * l], weights_[l].size()) =
          Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
      p.segment(offs[2 * l + 1], biases_[l].size()) = biases_[l];
    }
    return p;
  }

  void set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != parameter_count()) throw DomainError("parameter vector has the wrong size");
    auto offs = offsets();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) =
          p.segment(offs[2 * l], weights_[l].size());
      biases_[l] = p.segment(offs[2 * l + 1], biases_[l].size());
    }
  }

private:
  std::vector<Eigen::Index> offsets() const {
    std::vector<Eigen::Index> offs;
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      offs.push_back(at);
      at += weights_[l].size();
      offs.push_back(at);
      at += biases_[l].size();
    }
    return offs;
  }

  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

namespace detail {

/// Fisher-Yates over [0, n) driven by `rng`.
inline std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, const Eigen::Index* idx,
                                   Eigen::Index n) {
  Eigen::MatrixXd out(n, X.cols());
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = X.row(idx[i]);
  return out;
}

inline Eigen::VectorXd gather(const Eigen::VectorXd& y, const Eigen::Index* idx, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = y(idx[i]);
  return out;
}

}  // namespace detail

struct MlpFit {
  Mlp net;
  TrainingMeta meta;
};

/// Trains on MAE with Adam. The validation rows are the last
/// `validation_fraction` of a seeded shuffle; the returned weights are the
/// snapshot with the lowest validation MAE. Single-threaded and deterministic
/// for a fixed seed.
inline MlpFit train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const MlpConfig& config) {
  config.validate();
  if (X.rows() < 2) throw InsufficientDataError("MLP training needs at least 2 rows");
  if (X.rows() != y.size()) throw DomainError("design rows and target length differ");

  std::mt19937_64 rng(config.seed);
  const Eigen::Index n = X.rows();
  auto order = detail::shuffled_indices(n, rng);
  Eigen::Index n_val = static_cast<Eigen::Index>(
      std::llround(config.validation_fraction * static_cast<double>(n)));
  n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
  const Eigen::Index n_train = n - n_val;
  const Eigen::MatrixXd X_val = detail::gather_rows(X, order.data() + n_train, n_val);
  const Eigen::VectorXd y_val = detail::gather(y, order.data() + n_train, n_val);
  std::vector<Eigen::Index> train_idx(order.begin(), order.begin() + n_train);

  MlpFit fit;
  fit.net = Mlp(X.cols(), config, rng);
  fit.meta.seed = config.seed;

  Eigen::VectorXd params = fit.net.parameters();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd grad;
  double beta1_t = 1.0, beta2_t = 1.0;

  Mlp best = fit.net;
  double best_loss = fit.net.loss(X_val, y_val);
  if (!std::isfinite(best_loss)) throw TrainingError(0);
  std::size_t since_best = 0;

  const auto batch = static_cast<Eigen::Index>(config.batch_size);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = train_idx.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(train_idx[i - 1], train_idx[pick(rng)]);
    }
    for (Eigen::Index start = 0; start < n_train; start += batch) {
      const Eigen::Index len = std::min(batch, n_train - start);
      const auto Xb = detail::gather_rows(X, train_idx.data() + start, len);
      const auto yb = detail::gather(y, train_idx.data() + start, len);
      const double l = fit.net.loss_and_gradient(Xb, yb, grad);
      if (!std::isfinite(l) || !grad.allFinite()) throw TrainingError(epoch);
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      m = config.beta1 * m + (1.0 - config.beta1) * grad;
      v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseAbs2();
      const double step = config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      params -= step * (m.array() / (v.array().sqrt() + config.epsilon)).matrix();
      fit.net.set_parameters(params);
    }
    fit.meta.epochs_run = epoch;
    const double val = fit.net.loss(X_val, y_val);
    if (!std::isfinite(val)) throw TrainingError(epoch);
    if (val < best_loss) {
      best_loss = val;
      best = fit.net;
      fit.meta.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  fit.net = std::move(best);
  fit.meta.validation_loss = best_loss;
  return fit;
}

}  // namespace globalar
