#pragma once

/// @file
/// Sets of univariate series of heterogeneous length: ingestion from long-format
/// CSV, fixed-origin holdout splits and seeded synthetic generators.

#include <globalar/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace globalar {

struct TimeSeries {
  std::string id;
  std::vector<double> values;
  int season_period = 1;
  int horizon = 1;
  /// Extra metadata columns (e.g. a frequency label) keyed by column name.
  std::map<std::string, std::string> attributes;

  std::size_t size() const noexcept { return values.size(); }
};

/// Ordered, immutable collection of series with unique ids.
class TimeSeriesSet {
public:
  explicit TimeSeriesSet(std::vector<TimeSeries> series) : series_(std::move(series)) {
    if (series_.empty()) throw StructuralError("a series set needs at least one series");
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < series_.size(); ++i) {
      const auto& s = series_[i];
      if (!seen.insert(s.id).second) throw StructuralError("duplicate series id '" + s.id + "'");
      if (s.horizon < 1) throw DomainError("series '" + s.id + "': horizon must be >= 1");
      if (s.season_period < 1)
        throw DomainError("series '" + s.id + "': season_period must be >= 1");
      for (double v : s.values)
        if (!std::isfinite(v)) throw DomainError("series '" + s.id + "' holds a non-finite value");
      index_.emplace(s.id, i);
    }
  }

  std::size_t size() const noexcept { return series_.size(); }
  const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
  auto begin() const noexcept { return series_.cbegin(); }
  auto end() const noexcept { return series_.cend(); }
  const std::vector<TimeSeries>& series() const noexcept { return series_; }

  const TimeSeries& at(const std::string& id) const { return series_[index_of(id)]; }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw StructuralError("unknown series id '" + id + "'");
    return it->second;
  }

  std::size_t min_length() const {
    std::size_t m = series_.front().size();
    for (const auto& s : series_) m = std::min(m, s.size());
    return m;
  }

  /// Series satisfying `pred`, in set order. Throws if none do.
  template <typename Pred>
  TimeSeriesSet filter(Pred&& pred) const {
    std::vector<TimeSeries> kept;
    for (const auto& s : series_)
      if (pred(s)) kept.push_back(s);
    return TimeSeriesSet(std::move(kept));
  }

private:
  std::vector<TimeSeries> series_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TrainTestSplit {
  TimeSeriesSet train;
  /// Held-out values, aligned with `train` by position.
  std::vector<std::vector<double>> test;
};

/// Moves the final `horizon` observations of every series into the test part.
inline TrainTestSplit split_holdout(const TimeSeriesSet& set) {
  std::vector<TimeSeries> train;
  std::vector<std::vector<double>> test;
  train.reserve(set.size());
  test.reserve(set.size());
  for (const auto& s : set) {
    const auto h = static_cast<std::size_t>(s.horizon);
    if (s.size() <= h)
      throw StructuralError("series '" + s.id + "' of length " + std::to_string(s.size()) +
                            " cannot hold out a horizon of " + std::to_string(h));
    TimeSeries t = s;
    t.values.assign(s.values.begin(), s.values.end() - static_cast<std::ptrdiff_t>(h));
    test.emplace_back(s.values.end() - static_cast<std::ptrdiff_t>(h), s.values.end());
    train.push_back(std::move(t));
  }
  return {TimeSeriesSet(std::move(train)), std::move(test)};
}

/// Concatenates sets; ids must stay unique.
inline TimeSeriesSet merge(const std::vector<TimeSeriesSet>& sets) {
  std::vector<TimeSeries> all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  return TimeSeriesSet(std::move(all));
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, std::size_t line, const char* what) {
  text = trim(text);
  if (text.empty()) throw ParseError(std::string("missing ") + what, line);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
  if (!std::isfinite(v))
    throw ParseError(std::string("non-finite ") + what + " '" + std::string(text) + "'", line);
  return v;
}

inline long long parse_int(std::string_view text, std::size_t line, const char* what) {
  text = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

/// Shortest decimal text that parses back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Reads long-format `series_id,index,value` text. Series keep the order in
/// which their ids first appear.
inline TimeSeriesSet parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty input, expected header", 1);
  ++line_no;
  {
    auto f = detail::split_fields(line);
    if (f.size() != 3 || detail::trim(f[0]) != "series_id" || detail::trim(f[1]) != "index" ||
        detail::trim(f[2]) != "value")
      throw ParseError("expected header 'series_id,index,value'", line_no);
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::pair<long long, double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() != 3)
      throw ParseError("expected 3 fields, found " + std::to_string(f.size()), line_no);
    std::string id(detail::trim(f[0]));
    if (id.empty()) throw ParseError("empty series_id", line_no);
    auto idx = detail::parse_int(f[1], line_no, "index");
    auto val = detail::parse_double(f[2], line_no, "value");
    auto [it, fresh] = rows.try_emplace(id);
    if (fresh) order.push_back(id);
    it->second.emplace_back(idx, val);
  }
  if (order.empty()) throw StructuralError("no data rows");

  std::vector<TimeSeries> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    auto& r = rows[id];
    std::stable_sort(r.begin(), r.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < r.size(); ++k)
      if (r[k].first != r[k - 1].first + 1)
        throw StructuralError("series '" + id + "' has non-consecutive index " +
                              std::to_string(r[k - 1].first) + " -> " +
                              std::to_string(r[k].first));
    if (r.size() < 2)
      throw StructuralError("series '" + id + "' has fewer than 2 values");
    TimeSeries s;
    s.id = id;
    s.values.reserve(r.size());
    for (const auto& [_, v] : r) s.values.push_back(v);
    out.push_back(std::move(s));
  }
  return TimeSeriesSet(std::move(out));
}

/// Applies `series_id,season_period,horizon[,extra...]` metadata. Extra columns
/// become string attributes. Series absent from the metadata keep defaults.
inline TimeSeriesSet apply_metadata(const TimeSeriesSet& set, std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty metadata, expected header", 1);
  auto header = detail::split_fields(line);
  if (header.size() < 3 || detail::trim(header[0]) != "series_id" ||
      detail::trim(header[1]) != "season_period" || detail::trim(header[2]) != "horizon")
    throw ParseError("expected header 'series_id,season_period,horizon'", line_no);
  std::vector<std::string> extra_names;
  for (std::size_t k = 3; k < header.size(); ++k)
    extra_names.emplace_back(detail::trim(header[k]));

  std::vector<TimeSeries> series(set.begin(), set.end());
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(f.size()),
                       line_no);
    std::string id(detail::trim(f[0]));
    if (!set.contains(id))
      throw StructuralError("metadata line " + std::to_string(line_no) +
                            " names unknown series '" + id + "'");
    auto& s = series[set.index_of(id)];
    auto m = detail::parse_int(f[1], line_no, "season_period");
    auto h = detail::parse_int(f[2], line_no, "horizon");
    if (m < 1 || h < 1) throw ParseError("season_period and horizon must be >= 1", line_no);
    s.season_period = static_cast<int>(m);
    s.horizon = static_cast<int>(h);
    for (std::size_t k = 0; k < extra_names.size(); ++k)
      s.attributes[extra_names[k]] = std::string(detail::trim(f[3 + k]));
  }
  return TimeSeriesSet(std::move(series));
}

inline TimeSeriesSet load_csv(const std::string& path,
                              const std::optional<std::string>& meta_path = std::nullopt) {
  auto in = detail::open_input(path);
  auto set = parse_csv(in);
  if (meta_path) {
    auto meta = detail::open_input(*meta_path);
    set = apply_metadata(set, meta);
  }
  return set;
}

/// Writes values with the shortest round-trip decimal text so that
/// parse_csv(write_csv(s)) reproduces every double exactly.
inline void write_csv(const TimeSeriesSet& set, std::ostream& out) {
  out << "series_id,index,value\n";
  for (const auto& s : set)
    for (std::size_t t = 0; t < s.size(); ++t)
      out << s.id << ',' << t << ',' << detail::shortest(s.values[t]) << '\n';
}

inline void write_metadata(const TimeSeriesSet& set, std::ostream& out) {
  std::set<std::string> extra;
  for (const auto& s : set)
    for (const auto& [k, _] : s.attributes) extra.insert(k);
  out << "series_id,season_period,horizon";
  for (const auto& k : extra) out << ',' << k;
  out << '\n';
  for (const auto& s : set) {
    out << s.id << ',' << s.season_period << ',' << s.horizon;
    for (const auto& k : extra) {
      auto it = s.attributes.find(k);
      out << ',' << (it == s.attributes.end() ? std::string() : it->second);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic generators

enum class SyntheticKind {
  ar1,       ///< v[t+1] = phi * v[t] + e[t]
  seasonal,  ///< v[t] = amplitude * sin(2 pi t / m) + e[t]
  mixed,     ///< per series, a seeded coin picks ar1 or seasonal
  profile,   ///< per series, a random period-m pattern of scale `amplitude`, repeated
  logistic,  ///< v[t+1] = growth * v[t] * (1 - v[t]) + e[t]
};

struct SyntheticSpec {
  std::size_t count = 1;
  std::size_t length = 50;
  SyntheticKind kind = SyntheticKind::ar1;
  double phi = 0.5;
  int period = 12;
  double amplitude = 1.0;
  double growth = 3.8;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  /// Initial value for ar1/logistic; drawn from the stationary law (ar1) or
  /// uniformly on [0.1, 0.9] (logistic) when absent.
  std::optional<double> start;
  int horizon = 1;
  std::string id_prefix = "s";
};

namespace detail {

inline std::vector<double> gen_ar1(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> v(spec.length);
  if (spec.start) {
    v[0] = *spec.start;
  } else if (spec.noise_sd > 0.0) {
    v[0] = noise(rng) * spec.noise_sd / std::sqrt(1.0 - spec.phi * spec.phi);
  } else {
    v[0] = 1.0;
  }
  for (std::size_t t = 1; t < v.size(); ++t) {
    double e = spec.noise_sd > 0.0 ? spec.noise_sd * noise(rng) : 0.0;
    v[t] = spec.phi * v[t - 1] + e;
  }
  return v;
}

inline std::vector<double> gen_seasonal(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const int m = spec.period;
  std::vector<double> v(spec.length);
  for (std::size_t t = 0; t < v.size(); ++t) {
    // Phase from t mod m so noiseless output is exactly periodic.
    double phase = 2.0 * std::numbers::pi * static_cast<double>(t % m) / m;
    double e = spec.noise_sd > 0.0 ? spec.noise_sd * noise(rng) : 0.0;
    v[t] = spec.amplitude * std::sin(phase) + e;
  }
  return v;
}

inline std::vector<double> gen_profile(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> pattern(static_cast<std::size_t>(spec.period));
  for (auto& p : pattern) p = spec.amplitude * noise(rng);
  std::vector<double> v(spec.length);
  for (std::size_t t = 0; t < v.size(); ++t) {
    double e = spec.noise_sd > 0.0 ? spec.noise_sd * noise(rng) : 0.0;
    v[t] = pattern[t % pattern.size()] + e;
  }
  return v;
}

inline std::vector<double> gen_logistic(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  std::vector<double> v(spec.length);
  v[0] = spec.start ? *spec.start : unif(rng);
  for (std::size_t t = 1; t < v.size(); ++t) {
    double e = spec.noise_sd > 0.0 ? spec.noise_sd * noise(rng) : 0.0;
    v[t] = spec.growth * v[t - 1] * (1.0 - v[t - 1]) + e;
  }
  return v;
}

}  // namespace detail

/// Deterministic in `spec` (seed included).
inline TimeSeriesSet gen_synthetic(const SyntheticSpec& spec) {
  if (spec.count < 1) throw DomainError("synthetic count must be >= 1");
  if (spec.length < 4) throw DomainError("synthetic length must be >= 4");
  if (!(spec.noise_sd >= 0.0)) throw DomainError("noise_sd must be >= 0");
  if (spec.horizon < 1) throw DomainError("horizon must be >= 1");
  const bool uses_phi = spec.kind == SyntheticKind::ar1 || spec.kind == SyntheticKind::mixed;
  if (uses_phi && !(std::abs(spec.phi) < 1.0))
    throw DomainError("ar1 generator needs |phi| < 1 (got " + std::to_string(spec.phi) + ")");
  const bool uses_period = spec.kind == SyntheticKind::seasonal ||
                           spec.kind == SyntheticKind::mixed ||
                           spec.kind == SyntheticKind::profile;
  if (uses_period && spec.period < 2) throw DomainError("seasonal period must be >= 2");

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<TimeSeries> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    TimeSeries s;
    s.id = spec.id_prefix + std::to_string(i);
    s.horizon = spec.horizon;
    SyntheticKind kind = spec.kind;
    if (kind == SyntheticKind::mixed)
      kind = coin(rng) ? SyntheticKind::seasonal : SyntheticKind::ar1;
    switch (kind) {
      case SyntheticKind::ar1: s.values = detail::gen_ar1(spec, rng); break;
      case SyntheticKind::seasonal: s.values = detail::gen_seasonal(spec, rng); break;
      case SyntheticKind::profile: s.values = detail::gen_profile(spec, rng); break;
      case SyntheticKind::logistic: s.values = detail::gen_logistic(spec, rng); break;
      case SyntheticKind::mixed: break;
    }
    if (kind == SyntheticKind::seasonal || kind == SyntheticKind::profile)
      s.season_period = spec.period;
    for (double v : s.values)
      if (!std::isfinite(v)) throw DomainError("synthetic generator produced a non-finite value");
    out.push_back(std::move(s));
  }
  return TimeSeriesSet(std::move(out));
}

}  // namespace globalar
