// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "webpf/log_ingest.hpp"
#include "webpf/page_table.hpp"
#include "webpf/prefetch_agent.hpp"
#include "webpf/ratio.hpp"
#include "webpf/rule_repo.hpp"

namespace webpf {

struct SimReport {
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  std::uint64_t prefetch_issued = 0;
  std::uint64_t prefetch_used = 0;
  std::uint64_t bytes_prefetched = 0;
  std::uint64_t bytes_wasted = 0;
  std::uint64_t crawl_requests = 0;

  /// hits / requests, 0/1 when there were no requests.
  Ratio hit_rate() const;
  /// prefetch_used / prefetch_issued, 0/1 when nothing was prefetched.
  Ratio precision() const;

  SimReport& operator+=(const SimReport& other);
  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct ReplayOptions {
  std::size_t cache_capacity = 32;
  bool prefetch_enabled = true;
  /// Agent state is reset when a client is idle longer than this.
  std::chrono::seconds session_gap{30 * 60};
  std::uint64_t default_page_bytes = 1024;
  /// Used for every client when no groups are configured.
  AgentParams default_agent;
};

/// Observer called after each request with the client key, the agent (null
/// when the client is not prefetching) and what it did.
using ReplayObserver = std::function<void(const std::string&, const PrefetchAgent*, const RequestActions&)>;

/// Replays a trace request by request. Each client gets its own LRU cache and,
/// when prefetching applies to it, its own agent. Requests are processed in
/// timestamp order (stable). With groups configured, clients outside every
/// group are served without prefetching; with none, every client prefetches.
/// Throws std::invalid_argument for invalid groups before replaying.
SimReport replay(std::span<const LogRecord> trace, const RuleRepository& repo, PageTable& pages,
                 std::span<const GroupClientConfig> groups, const ReplayOptions& options,
                 const ReplayObserver& observer = {});

std::string report_to_json(const SimReport& report);
SimReport report_from_json(std::string_view json);
/// `metric,value` rows with a header line.
std::string report_to_csv(const SimReport& report);
/// Side-by-side text table of a baseline and a prefetching run.
std::string render_comparison(const SimReport& baseline, const SimReport& prefetch);

/// Cost of reaching a result at 1-based `position` when results are shown
/// `page_size` per page: position x page number.
std::uint64_t search_area(std::uint64_t position, std::uint64_t page_size = 10);

/// sa_prime / sa in lowest terms.
Ratio search_area_ratio(std::uint64_t sa_prime, std::uint64_t sa);

struct RelevanceEntry {
  PageId url;
  std::uint64_t relevancy = 0;
  friend bool operator==(const RelevanceEntry&, const RelevanceEntry&) = default;
};

/// Ranked result listing; relevancy runs from size() at position 1 down to 1.
struct RelevanceListing {
  std::vector<RelevanceEntry> entries;
  std::uint64_t page_size = 10;

  static RelevanceListing ranked(std::span<const PageId> urls, std::uint64_t page_size = 10);
  /// 1-based position of `url`, 0 if absent.
  std::size_t position_of(PageId url) const;
  std::uint64_t page_of(std::size_t position) const { return (position + page_size - 1) / page_size; }
};

/// Moves the pages that follow `accessed` in repository rules to the positions
/// right after `accessed`, best rule first, and re-assigns relevancy by
/// position. All other entries keep their relative order.
/// Throws std::invalid_argument if `accessed` is not listed.
RelevanceListing reposition(const RelevanceListing& listing, const RuleRepository& repo, PageId accessed);

}  // namespace webpf
