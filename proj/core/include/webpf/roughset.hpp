// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "webpf/page_table.hpp"
#include "webpf/sessionizer.hpp"

namespace webpf {

/// Sorted, duplicate-free set of object (session) indices.
using ObjectSet = std::vector<std::size_t>;

/// Objects 0..n-1 described by discrete attributes 0..m-1. Immutable.
class InformationSystem {
 public:
  /// `values` is row-major, objects x attributes. Each value must be below its
  /// attribute's domain size.
  InformationSystem(std::size_t objects, std::vector<std::uint8_t> domain_sizes, std::vector<std::uint8_t> values,
                    std::vector<PageId> attribute_pages = {});

  std::size_t object_count() const { return objects_; }
  std::size_t attribute_count() const { return domain_sizes_.size(); }
  std::uint8_t value(std::size_t object, std::size_t attribute) const {
    return values_[object * domain_sizes_.size() + attribute];
  }
  std::uint8_t domain_size(std::size_t attribute) const { return domain_sizes_[attribute]; }
  /// The page behind each attribute, when built from sessions.
  const std::vector<PageId>& attribute_pages() const { return attribute_pages_; }

 private:
  std::size_t objects_;
  std::vector<std::uint8_t> domain_sizes_;
  std::vector<std::uint8_t> values_;
  std::vector<PageId> attribute_pages_;
};

/// Dwell bucketing of a page within a session. A visited page with total dwell
/// d lands in bucket |{t in thresholds : t <= d}|; unvisited pages are bucket 0.
/// Thresholds must start at 0 and be strictly increasing, at least two of them.
struct Bucketing {
  std::vector<std::int64_t> thresholds{0, 60};
  /// A page becomes an attribute only if it occurs in at least this many sessions.
  std::size_t min_page_support = 1;
};

InformationSystem build_information_system(std::span<const Session> sessions, const Bucketing& bucketing);

/// Disjoint blocks covering 0..universe_size-1. Canonical form: members sorted,
/// blocks ordered by their smallest member.
struct Partition {
  std::size_t universe_size = 0;
  std::vector<ObjectSet> blocks;
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Blocks of the indiscernibility relation over the attribute subset `b`.
Partition indiscernibility_partition(const InformationSystem& is, std::span<const std::size_t> b);

ObjectSet lower_approximation(const Partition& p, ObjectSet target);
ObjectSet upper_approximation(const Partition& p, ObjectSet target);

struct Approximations {
  ObjectSet lower;
  ObjectSet upper;
  ObjectSet boundary;
};

Approximations approximate(const Partition& p, const ObjectSet& target);

struct QualityOptions {
  Bucketing bucketing;
  /// Sessions whose total dwell reaches this quantile of the dwell
  /// distribution form the target set.
  double target_quantile = 0.5;
};

struct QualitySelection {
  std::vector<Session> sessions;
  ObjectSet target;
  ObjectSet lower;
  /// The lower approximation was empty and the target set was used instead.
  bool fallback = false;
};

/// Sessions in the lower approximation of the high-dwell target set over the
/// partition induced by every attribute.
QualitySelection select_quality_sessions(std::span<const Session> sessions, const QualityOptions& options = {});

}  // namespace webpf
