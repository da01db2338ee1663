#pragma once

/// @file
/// Disjoint groupings of a series set, and one global model per group. The
/// trivial partition (one group) is the global method; the atomic partition
/// (one series per group) is the local method.

#include <globalar/dataset.hpp>
#include <globalar/error.hpp>
#include <globalar/parallel.hpp>
#include <globalar/pipeline.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace globalar {

enum class PartitionScheme { random, by_key, atomic, trivial };

struct Partition {
  std::map<std::string, std::size_t> assignment;
  std::size_t groups = 1;
  PartitionScheme scheme = PartitionScheme::trivial;
  std::uint64_t seed = 0;
  std::string key;
  /// Key value of each group under the keyed scheme.
  std::vector<std::string> labels;

  std::size_t group_of(const std::string& id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) throw StructuralError("series '" + id + "' is not partitioned");
    return it->second;
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(groups, 0);
    for (const auto& [_, g] : assignment) ++s[g];
    return s;
  }

  /// Members of group g in the order they appear in `set`.
  TimeSeriesSet members(const TimeSeriesSet& set, std::size_t g) const {
    return set.filter([&](const TimeSeries& s) { return group_of(s.id) == g; });
  }
};

namespace detail {

inline PartitionScheme classify(std::size_t groups, std::size_t k, PartitionScheme fallback) {
  if (groups == 1) return PartitionScheme::trivial;
  if (groups == k) return PartitionScheme::atomic;
  return fallback;
}

}  // namespace detail

/// Sorts ids, shuffles them with `seed`, then deals them round-robin into P
/// groups, so group sizes differ by at most one and the result does not
/// depend on the order of the input set.
inline Partition random_partition(const TimeSeriesSet& set, std::size_t groups,
                                  std::uint64_t seed) {
  if (groups < 1 || groups > set.size())
    throw DomainError("partition count " + std::to_string(groups) + " outside 1.." +
                      std::to_string(set.size()));
  std::vector<std::string> ids;
  ids.reserve(set.size());
  for (const auto& s : set) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(ids[i - 1], ids[pick(rng)]);
  }
  Partition p;
  p.groups = groups;
  p.seed = seed;
  p.scheme = detail::classify(groups, set.size(), PartitionScheme::random);
  for (std::size_t i = 0; i < ids.size(); ++i) p.assignment.emplace(ids[i], i % groups);
  return p;
}

/// Value of a metadata field: season_period, horizon, or a named attribute.
inline std::string metadata_value(const TimeSeries& s, const std::string& key) {
  if (key == "season_period") return std::to_string(s.season_period);
  if (key == "horizon") return std::to_string(s.horizon);
  auto it = s.attributes.find(key);
  if (it == s.attributes.end() || it->second.empty())
    throw StructuralError("series '" + s.id + "' has no value for key '" + key + "'");
  return it->second;
}

/// One group per distinct key value. Groups are ordered by key value,
/// numerically when every value is an integer.
inline Partition keyed_partition(const TimeSeriesSet& set, const std::string& key) {
  std::vector<std::string> values;
  for (const auto& s : set) values.push_back(metadata_value(s, key));
  std::vector<std::string> distinct = values;
  const bool numeric = std::all_of(distinct.begin(), distinct.end(), [](const std::string& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  });
  auto less = [numeric](const std::string& a, const std::string& b) {
    if (numeric && a.size() != b.size()) return a.size() < b.size();
    return a < b;
  };
  std::sort(distinct.begin(), distinct.end(), less);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Partition p;
  p.groups = distinct.size();
  p.key = key;
  p.labels = distinct;
  p.scheme = detail::classify(p.groups, set.size(), PartitionScheme::by_key);
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto g = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), values[i], less) - distinct.begin());
    p.assignment.emplace(set[i].id, g);
  }
  return p;
}

/// Fits one global model per group, in parallel when `threads` > 1. The
/// result's models are indexed by group.
inline FittedSet fit_partitioned(const TimeSeriesSet& train, const Partition& partition,
                                 const ModelSpec& spec, const PreprocessSpec& prep,
                                 std::size_t threads = 1) {
  std::vector<std::optional<FittedSet>> per_group(partition.groups);
  parallel_for(partition.groups, threads, [&](std::size_t g) {
    try {
      per_group[g] = fit_global(partition.members(train, g), spec, prep);
    } catch (const Error& e) {
      throw StructuralError("group " + std::to_string(g) + ": " + e.what());
    }
  });
  FittedSet out;
  for (std::size_t g = 0; g < partition.groups; ++g) {
    auto& f = *per_group[g];
    out.models.push_back(std::move(f.models.front()));
    for (const auto& [id, _] : f.model_of) out.model_of.emplace(id, g);
    out.scales.merge(f.scales);
    out.extras.merge(f.extras);
    out.failures.merge(f.failures);
  }
  return out;
}

}  // namespace globalar
