// SPDX-License-Identifier: Apache-2.0
#include "webpf/roughset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace webpf {

namespace {

ObjectSet normalized(ObjectSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

void check_target(const Partition& p, const ObjectSet& target) {
  if (!target.empty() && target.back() >= p.universe_size) {
    throw std::invalid_argument("target set is not a subset of the universe");
  }
}

}  // namespace

InformationSystem::InformationSystem(std::size_t objects, std::vector<std::uint8_t> domain_sizes,
                                     std::vector<std::uint8_t> values, std::vector<PageId> attribute_pages)
    : objects_(objects),
      domain_sizes_(std::move(domain_sizes)),
      values_(std::move(values)),
      attribute_pages_(std::move(attribute_pages)) {
  if (objects_ == 0) throw std::invalid_argument("information system needs a non-empty universe");
  if (values_.size() != objects_ * domain_sizes_.size()) {
    throw std::invalid_argument("value table size does not match objects x attributes");
  }
  if (!attribute_pages_.empty() && attribute_pages_.size() != domain_sizes_.size()) {
    throw std::invalid_argument("attribute page labels do not match attribute count");
  }
  for (std::size_t o = 0; o < objects_; ++o) {
    for (std::size_t a = 0; a < domain_sizes_.size(); ++a) {
      if (value(o, a) >= domain_sizes_[a]) throw std::invalid_argument("attribute value outside its domain");
    }
  }
}

InformationSystem build_information_system(std::span<const Session> sessions, const Bucketing& bucketing) {
  if (sessions.empty()) throw std::invalid_argument("cannot build an information system from zero sessions");
  const auto& t = bucketing.thresholds;
  if (t.size() < 2 || t.size() > 254 || t.front() != 0 || std::adjacent_find(t.begin(), t.end(), [](auto a, auto b) {
                                                              return b <= a;
                                                            }) != t.end()) {
    throw std::invalid_argument("dwell thresholds must start at 0 and be strictly increasing (at least two)");
  }

  std::vector<DwellProfile> profiles;
  profiles.reserve(sessions.size());
  std::map<PageId, std::size_t> support;
  for (const auto& s : sessions) {
    profiles.push_back(dwell_profile(s));
    for (const auto& [page, dwell] : profiles.back().per_page) ++support[page];
  }
  std::vector<PageId> attrs;
  for (const auto& [page, n] : support) {
    if (n >= bucketing.min_page_support) attrs.push_back(page);
  }

  auto bucket = [&](std::int64_t dwell) {
    return static_cast<std::uint8_t>(std::upper_bound(t.begin(), t.end(), dwell) - t.begin());
  };
  std::vector<std::uint8_t> values(sessions.size() * attrs.size(), 0);
  for (std::size_t o = 0; o < sessions.size(); ++o) {
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      if (auto it = profiles[o].per_page.find(attrs[a]); it != profiles[o].per_page.end()) {
        // Visited pages never fall into the "unvisited" bucket, even with a
        // negative dwell from clock skew.
        values[o * attrs.size() + a] = std::max<std::uint8_t>(1, bucket(it->second));
      }
    }
  }
  std::vector<std::uint8_t> domains(attrs.size(), static_cast<std::uint8_t>(t.size() + 1));
  return InformationSystem{sessions.size(), std::move(domains), std::move(values), std::move(attrs)};
}

Partition indiscernibility_partition(const InformationSystem& is, std::span<const std::size_t> b) {
  if (b.empty()) throw std::invalid_argument("attribute subset B must not be empty");
  for (std::size_t a : b) {
    if (a >= is.attribute_count()) throw std::invalid_argument("unknown attribute " + std::to_string(a));
  }
  Partition p;
  p.universe_size = is.object_count();
  std::map<std::vector<std::uint8_t>, std::size_t> block_of;
  std::vector<std::uint8_t> key(b.size());
  for (std::size_t o = 0; o < is.object_count(); ++o) {
    for (std::size_t i = 0; i < b.size(); ++i) key[i] = is.value(o, b[i]);
    auto [it, inserted] = block_of.try_emplace(key, p.blocks.size());
    if (inserted) p.blocks.emplace_back();
    p.blocks[it->second].push_back(o);
  }
  return p;
}

ObjectSet lower_approximation(const Partition& p, ObjectSet target) {
  target = normalized(std::move(target));
  check_target(p, target);
  ObjectSet out;
  for (const auto& block : p.blocks) {
    if (std::includes(target.begin(), target.end(), block.begin(), block.end())) {
      out.insert(out.end(), block.begin(), block.end());
    }
  }
  return normalized(std::move(out));
}

ObjectSet upper_approximation(const Partition& p, ObjectSet target) {
  target = normalized(std::move(target));
  check_target(p, target);
  ObjectSet out;
  for (const auto& block : p.blocks) {
    const bool touches = std::any_of(block.begin(), block.end(),
                                     [&](std::size_t o) { return std::binary_search(target.begin(), target.end(), o); });
    if (touches) out.insert(out.end(), block.begin(), block.end());
  }
  return normalized(std::move(out));
}

Approximations approximate(const Partition& p, const ObjectSet& target) {
  Approximations a{lower_approximation(p, target), upper_approximation(p, target), {}};
  std::set_difference(a.upper.begin(), a.upper.end(), a.lower.begin(), a.lower.end(), std::back_inserter(a.boundary));
  return a;
}

QualitySelection select_quality_sessions(std::span<const Session> sessions, const QualityOptions& options) {
  if (sessions.empty()) throw std::invalid_argument("no sessions to select from");
  if (!(options.target_quantile >= 0.0 && options.target_quantile <= 1.0)) {
    throw std::invalid_argument("target quantile must lie in [0, 1]");
  }
  const InformationSystem is = build_information_system(sessions, options.bucketing);

  std::vector<std::int64_t> totals;
  totals.reserve(sessions.size());
  for (const auto& s : sessions) totals.push_back(dwell_profile(s).total);
  std::vector<std::int64_t> sorted = totals;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::floor(options.target_quantile * static_cast<double>(sorted.size() - 1)));
  const std::int64_t cut = sorted[rank];

  QualitySelection sel;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] >= cut) sel.target.push_back(i);
  }

  Partition p;
  if (is.attribute_count() == 0) {
    ObjectSet all(sessions.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    p = Partition{sessions.size(), {all}};
  } else {
    std::vector<std::size_t> every(is.attribute_count());
    std::iota(every.begin(), every.end(), std::size_t{0});
    p = indiscernibility_partition(is, every);
  }
  sel.lower = lower_approximation(p, sel.target);

  const ObjectSet& chosen = sel.lower.empty() ? sel.target : sel.lower;
  sel.fallback = sel.lower.empty();
  for (std::size_t i : chosen) sel.sessions.push_back(sessions[i]);
  return sel;
}

}  // namespace webpf
