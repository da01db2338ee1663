#pragma once

/// @file
/// Hoeffding-style uniform generalization bounds for finite hypothesis
/// classes fit to K independent series of effective sample size N each.
///
/// With probability at least 1 - delta, out-of-sample error exceeds in-sample
/// error by less than
///
///     t = sqrt((log|H| + log(2 / delta)) / (2 N K)),
///
/// where log|H| is the log size of the class searched. A local method that
/// picks one function per series from classes H_1..H_K searches the product
/// class, so its log size is sum_i log|H_i|; a method fitting one model per
/// group of a P-group partition sums the P group class sizes. Hypothesis
/// counts stay in log space throughout.

#include <globalar/error.hpp>

#include <cmath>
#include <numeric>
#include <span>
#include <string>

namespace globalar {

struct BoundQuery {
  double log_hyp = 0.0;  ///< natural log of the hypothesis count
  double n = 1.0;        ///< effective sample size per series
  double k = 1.0;        ///< number of series
  double delta = 0.05;
};

struct BoundResult {
  double t = 0.0;
  BoundQuery query;
};

inline BoundResult bound_halfwidth(const BoundQuery& q) {
  if (!(q.delta > 0.0 && q.delta < 1.0))
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(q.delta));
  if (!(q.n > 0.0)) throw DomainError("effective sample size must be > 0");
  if (!(q.k >= 1.0)) throw DomainError("series count must be >= 1");
  if (!(q.log_hyp >= 0.0) || !std::isfinite(q.log_hyp))
    throw DomainError("log hypothesis count must be finite and >= 0");
  const double t = std::sqrt((q.log_hyp + std::log(2.0 / q.delta)) / (2.0 * q.n * q.k));
  return {t, q};
}

/// log of the product of per-series class sizes.
inline double local_log_complexity(std::span<const double> per_series_log_sizes) {
  if (per_series_log_sizes.empty()) throw DomainError("need at least one per-series class size");
  for (double x : per_series_log_sizes)
    if (!(x >= 0.0)) throw DomainError("log class sizes must be >= 0");
  return std::accumulate(per_series_log_sizes.begin(), per_series_log_sizes.end(), 0.0);
}

/// Global memory whose parameter count matches local orders L_i in total:
/// with each parameter taking one of 2^64 values, a global AR(sum L_i) and
/// the local AR(L_i) family search classes of the same size.
inline long long memory_equivalent(std::span<const long long> local_orders) {
  if (local_orders.empty()) throw DomainError("need at least one local order");
  long long total = 0;
  for (long long l : local_orders) {
    if (l < 1) throw DomainError("local orders must be >= 1");
    total += l;
  }
  return total;
}

/// log class size of an AR model with `parameters` 64-bit coefficients.
inline double parameter_log_complexity(double parameters) {
  return parameters * 64.0 * std::log(2.0);
}

/// Bound for one model per group of a P-group partition, 1 <= P <= K.
inline BoundResult partitioned_bound(std::span<const double> per_group_log_sizes, double n,
                                     double k, double delta) {
  if (per_group_log_sizes.empty()) throw DomainError("a partition has at least one group");
  if (static_cast<double>(per_group_log_sizes.size()) > k)
    throw DomainError("a partition cannot have more groups than series");
  return bound_halfwidth({local_log_complexity(per_group_log_sizes), n, k, delta});
}

}  // namespace globalar
