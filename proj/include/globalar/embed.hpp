#pragma once

/// @file
/// Lag embedding of series into (window -> next value) rows, pooling of the
/// rows of many series into one design matrix, and polynomial featurization.

#include <globalar/dataset.hpp>
#include <globalar/error.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace globalar {

/// How a lag window becomes a feature row: monomials up to `degree` of the
/// window (degree 1 is the raw window), followed by `n_extras` per-series
/// constant columns.
struct FeatureMap {
  int degree = 1;
  std::size_t n_extras = 0;

  bool operator==(const FeatureMap&) const = default;

  std::string describe() const {
    std::string s = degree == 1 ? "raw" : "poly(" + std::to_string(degree) + ")";
    if (n_extras) s += "+extras(" + std::to_string(n_extras) + ")";
    return s;
  }
};

/// C(p + degree, degree) - 1: monomials of total degree 1..degree in p inputs.
inline std::size_t poly_feature_count(std::size_t p, int degree) {
  // Incremental product keeps every intermediate an exact binomial.
  std::size_t c = 1;
  for (int k = 1; k <= degree; ++k) c = c * (p + static_cast<std::size_t>(k)) / k;
  return c - 1;
}

inline std::size_t feature_count(std::size_t p, const FeatureMap& map) {
  return (map.degree == 1 ? p : poly_feature_count(p, map.degree)) + map.n_extras;
}

/// Writes all monomials of `x` with total degree 1..degree into `out`, in
/// graded lexicographic order: x1..xp, then x1x1, x1x2, ..., xpxp, then cubes.
inline void expand_monomials(std::span<const double> x, int degree, std::vector<double>& out) {
  out.clear();
  out.insert(out.end(), x.begin(), x.end());
  // Each monomial of the previous degree remembers its largest variable index;
  // extending only with indices >= that index enumerates multisets in lex order.
  std::vector<std::size_t> last(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) last[j] = j;
  std::size_t prev_begin = 0, prev_end = x.size();
  for (int d = 2; d <= degree; ++d) {
    std::vector<std::size_t> next_last;
    for (std::size_t m = prev_begin; m < prev_end; ++m) {
      const double base = out[m];
      for (std::size_t j = last[m - prev_begin]; j < x.size(); ++j) {
        out.push_back(base * x[j]);
        next_last.push_back(j);
      }
    }
    prev_begin = prev_end;
    prev_end = out.size();
    last = std::move(next_last);
  }
}

/// Feature vector for one window plus its series' extras.
inline std::vector<double> featurize(std::span<const double> window, const FeatureMap& map,
                                     std::span<const double> extras = {}) {
  if (extras.size() != map.n_extras)
    throw DomainError("expected " + std::to_string(map.n_extras) + " extra features, got " +
                      std::to_string(extras.size()));
  std::vector<double> out;
  if (map.degree == 1)
    out.assign(window.begin(), window.end());
  else
    expand_monomials(window, map.degree, out);
  out.insert(out.end(), extras.begin(), extras.end());
  return out;
}

struct RowOrigin {
  std::uint32_t series;  ///< index into DesignMatrix::series_ids
  std::uint32_t time;    ///< index of the target value within its series
};

struct DesignMatrix {
  Eigen::MatrixXd features;  ///< rows x d
  Eigen::VectorXd targets;
  std::vector<std::string> series_ids;
  std::vector<RowOrigin> provenance;
  std::size_t order = 0;
  FeatureMap feature_map;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
  const std::string& series_of(Eigen::Index row) const {
    return series_ids[provenance[static_cast<std::size_t>(row)].series];
  }
};

namespace detail {

inline void fill_window_rows(const std::vector<double>& v, std::size_t p, std::uint32_t sid,
                             DesignMatrix& m, Eigen::Index& row) {
  for (std::size_t t = p; t < v.size(); ++t, ++row) {
    for (std::size_t j = 0; j < p; ++j) m.features(row, static_cast<Eigen::Index>(j)) = v[t - p + j];
    m.targets(row) = v[t];
    m.provenance.push_back({sid, static_cast<std::uint32_t>(t)});
  }
}

}  // namespace detail

/// Rows (v[t-p], ..., v[t-1]) -> v[t] for t = p..n-1, oldest lag first.
inline DesignMatrix embed_series(const TimeSeries& series, std::size_t p) {
  if (p < 1) throw DomainError("embedding order must be >= 1");
  if (p >= series.size())
    throw StructuralError("series '" + series.id + "' of length " +
                          std::to_string(series.size()) + " has no rows at order " +
                          std::to_string(p));
  DesignMatrix m;
  const auto n = static_cast<Eigen::Index>(series.size() - p);
  m.features.resize(n, static_cast<Eigen::Index>(p));
  m.targets.resize(n);
  m.series_ids = {series.id};
  m.order = p;
  m.provenance.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  detail::fill_window_rows(series.values, p, 0, m, row);
  return m;
}

/// Row-wise concatenation in input order.
inline DesignMatrix pool(const std::vector<DesignMatrix>& parts) {
  if (parts.empty()) throw DomainError("nothing to pool");
  const auto& first = parts.front();
  Eigen::Index rows = 0;
  for (const auto& m : parts) {
    if (m.order != first.order || !(m.feature_map == first.feature_map) ||
        m.cols() != first.cols())
      throw StructuralError("cannot pool design matrices of order " +
                            std::to_string(first.order) + "/" + first.feature_map.describe() +
                            " and " + std::to_string(m.order) + "/" + m.feature_map.describe());
    rows += m.rows();
  }
  DesignMatrix out;
  out.order = first.order;
  out.feature_map = first.feature_map;
  out.features.resize(rows, first.cols());
  out.targets.resize(rows);
  out.provenance.reserve(static_cast<std::size_t>(rows));
  std::unordered_map<std::string, std::uint32_t> ids;
  Eigen::Index at = 0;
  for (const auto& m : parts) {
    out.features.middleRows(at, m.rows()) = m.features;
    out.targets.segment(at, m.rows()) = m.targets;
    at += m.rows();
    for (const auto& o : m.provenance) {
      const auto& id = m.series_ids[o.series];
      auto [it, fresh] = ids.try_emplace(id, static_cast<std::uint32_t>(out.series_ids.size()));
      if (fresh) out.series_ids.push_back(id);
      out.provenance.push_back({it->second, o.time});
    }
  }
  return out;
}

/// Pooled raw embedding of a whole set at order p. Equivalent to pooling
/// embed_series over the set, without the intermediate copies.
inline DesignMatrix embed_set(const TimeSeriesSet& set, std::size_t p) {
  if (p < 1) throw DomainError("embedding order must be >= 1");
  Eigen::Index rows = 0;
  for (const auto& s : set) {
    if (p >= s.size())
      throw StructuralError("series '" + s.id + "' of length " + std::to_string(s.size()) +
                            " has no rows at order " + std::to_string(p));
    rows += static_cast<Eigen::Index>(s.size() - p);
  }
  DesignMatrix m;
  m.order = p;
  m.features.resize(rows, static_cast<Eigen::Index>(p));
  m.targets.resize(rows);
  m.provenance.reserve(static_cast<std::size_t>(rows));
  Eigen::Index row = 0;
  for (const auto& s : set) {
    auto sid = static_cast<std::uint32_t>(m.series_ids.size());
    m.series_ids.push_back(s.id);
    detail::fill_window_rows(s.values, p, sid, m, row);
  }
  return m;
}

inline constexpr std::size_t default_feature_cap = 20000;

/// Replaces raw lag features by every monomial of total degree 1..degree.
inline DesignMatrix expand_poly(const DesignMatrix& m, int degree,
                                std::size_t cap = default_feature_cap) {
  if (degree != 2 && degree != 3) throw DomainError("polynomial degree must be 2 or 3");
  if (m.feature_map.degree != 1 || m.feature_map.n_extras != 0)
    throw StructuralError("polynomial expansion needs a raw lag embedding, got " +
                          m.feature_map.describe());
  const std::size_t d = poly_feature_count(m.order, degree);
  if (d > cap)
    throw DomainError("polynomial expansion of order " + std::to_string(m.order) + " at degree " +
                      std::to_string(degree) + " needs " + std::to_string(d) +
                      " features, above the cap of " + std::to_string(cap));
  DesignMatrix out;
  out.order = m.order;
  out.feature_map = {degree, 0};
  out.series_ids = m.series_ids;
  out.provenance = m.provenance;
  out.targets = m.targets;
  out.features.resize(m.rows(), static_cast<Eigen::Index>(d));
  std::vector<double> window(m.order), mono;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < m.order; ++j) window[j] = m.features(r, static_cast<Eigen::Index>(j));
    expand_monomials(window, degree, mono);
    for (std::size_t j = 0; j < d; ++j) out.features(r, static_cast<Eigen::Index>(j)) = mono[j];
  }
  return out;
}

using SeriesExtras = std::map<std::string, std::vector<double>>;

/// Appends each row's series constants as trailing columns.
inline DesignMatrix append_constant_columns(const DesignMatrix& m, const SeriesExtras& extras) {
  std::size_t e = 0;
  bool first = true;
  std::vector<const std::vector<double>*> by_series(m.series_ids.size());
  for (std::size_t i = 0; i < m.series_ids.size(); ++i) {
    auto it = extras.find(m.series_ids[i]);
    if (it == extras.end())
      throw StructuralError("no extra features for series '" + m.series_ids[i] + "'");
    if (first) {
      e = it->second.size();
      first = false;
    } else if (it->second.size() != e) {
      throw StructuralError("extra feature vectors differ in length");
    }
    by_series[i] = &it->second;
  }
  DesignMatrix out = m;
  out.feature_map.n_extras += e;
  const auto d0 = m.cols();
  out.features.conservativeResize(Eigen::NoChange, d0 + static_cast<Eigen::Index>(e));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& x = *by_series[m.provenance[static_cast<std::size_t>(r)].series];
    for (std::size_t k = 0; k < e; ++k) out.features(r, d0 + static_cast<Eigen::Index>(k)) = x[k];
  }
  return out;
}

}  // namespace globalar
