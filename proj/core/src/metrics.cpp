// SPDX-License-Identifier: Apache-2.0
#include "webpf/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace webpf {

Ratio SimReport::hit_rate() const { return requests == 0 ? Ratio{0, 1} : Ratio{hits, requests}; }

Ratio SimReport::precision() const {
  return prefetch_issued == 0 ? Ratio{0, 1} : Ratio{prefetch_used, prefetch_issued};
}

SimReport& SimReport::operator+=(const SimReport& o) {
  requests += o.requests;
  hits += o.hits;
  prefetch_issued += o.prefetch_issued;
  prefetch_used += o.prefetch_used;
  bytes_prefetched += o.bytes_prefetched;
  bytes_wasted += o.bytes_wasted;
  crawl_requests += o.crawl_requests;
  return *this;
}

namespace {

struct Client {
  explicit Client(std::size_t capacity) : cache(capacity) {}
  CacheModel cache;
  std::optional<PrefetchAgent> agent;
  std::chrono::sys_seconds last{};
};

std::uint64_t wasted_bytes(const std::optional<CacheEntry>& e) {
  return e && e->prefetched && !e->used ? e->bytes : 0;
}

}  // namespace

SimReport replay(std::span<const LogRecord> trace, const RuleRepository& repo, PageTable& pages,
                 std::span<const GroupClientConfig> groups, const ReplayOptions& options,
                 const ReplayObserver& observer) {
  validate_groups(groups);
  if (options.cache_capacity == 0) throw std::invalid_argument("cache capacity must be positive");

  std::vector<std::size_t> order(trace.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trace[a].timestamp < trace[b].timestamp; });

  SimReport report;
  PageSizes sizes{options.default_page_bytes};
  std::map<std::string, Client> clients;

  for (std::size_t idx : order) {
    const LogRecord& r = trace[idx];
    const PageId page = pages.intern(r.resource);

    auto [it, created] = clients.try_emplace(r.client_ip, options.cache_capacity);
    Client& c = it->second;
    if (created && options.prefetch_enabled) {
      if (groups.empty()) {
        c.agent.emplace(repo, options.default_agent);
      } else if (auto g = ip_match(r.client_ip, groups)) {
        c.agent.emplace(repo, groups[*g].agent);
      }
    }
    if (!created && c.agent && r.timestamp - c.last > options.session_gap) c.agent->reset();
    c.last = r.timestamp;

    RequestActions actions;
    if (c.agent) {
      actions = c.agent->on_request(page, c.cache);
    } else {
      const AccessResult a = c.cache.access(page);
      actions.hit = a.hit;
      actions.prefetch_used = a.prefetch_used;
      actions.evicted = a.evicted;
    }
    sizes.observe(page, r.bytes);

    ++report.requests;
    report.hits += actions.hit ? 1 : 0;
    report.prefetch_used += actions.prefetch_used ? 1 : 0;
    report.bytes_wasted += wasted_bytes(actions.evicted);
    report.crawl_requests += actions.crawl_request ? 1 : 0;

    if (!actions.prefetch.empty()) {
      const PageLoadResult load = page_load(c.cache, actions.prefetch, sizes);
      report.prefetch_issued += load.loaded.size();
      report.bytes_prefetched += load.bytes_prefetched;
      for (const auto& e : load.evicted) report.bytes_wasted += wasted_bytes(e);
    }
    if (observer) observer(r.client_ip, c.agent ? &*c.agent : nullptr, actions);
  }

  for (const auto& [key, c] : clients) {
    for (const auto& e : c.cache.entries()) report.bytes_wasted += wasted_bytes(e);
  }
  return report;
}

std::string report_to_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["requests"] = r.requests;
  j["hits"] = r.hits;
  j["prefetch_issued"] = r.prefetch_issued;
  j["prefetch_used"] = r.prefetch_used;
  j["bytes_prefetched"] = r.bytes_prefetched;
  j["bytes_wasted"] = r.bytes_wasted;
  j["crawl_requests"] = r.crawl_requests;
  j["hit_rate"] = r.hit_rate().to_string();
  j["hit_rate_value"] = r.hit_rate().value();
  j["precision"] = r.precision().to_string();
  j["precision_value"] = r.precision().value();
  return j.dump(2) + "\n";
}

SimReport report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SimReport r;
    r.requests = j.at("requests").get<std::uint64_t>();
    r.hits = j.at("hits").get<std::uint64_t>();
    r.prefetch_issued = j.at("prefetch_issued").get<std::uint64_t>();
    r.prefetch_used = j.at("prefetch_used").get<std::uint64_t>();
    r.bytes_prefetched = j.at("bytes_prefetched").get<std::uint64_t>();
    r.bytes_wasted = j.at("bytes_wasted").get<std::uint64_t>();
    r.crawl_requests = j.at("crawl_requests").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid report: ") + e.what());
  }
}

std::string report_to_csv(const SimReport& r) {
  std::ostringstream out;
  out << "metric,value\n"
      << "requests," << r.requests << '\n'
      << "hits," << r.hits << '\n'
      << "prefetch_issued," << r.prefetch_issued << '\n'
      << "prefetch_used," << r.prefetch_used << '\n'
      << "bytes_prefetched," << r.bytes_prefetched << '\n'
      << "bytes_wasted," << r.bytes_wasted << '\n'
      << "crawl_requests," << r.crawl_requests << '\n'
      << std::setprecision(6) << std::fixed << "hit_rate," << r.hit_rate().value() << '\n'
      << "precision," << r.precision().value() << '\n';
  return out.str();
}

std::string render_comparison(const SimReport& baseline, const SimReport& prefetch) {
  std::ostringstream out;
  auto row = [&](std::string_view name, auto a, auto b) {
    out << std::left << std::setw(18) << name << std::right << std::setw(14) << a << std::setw(14) << b << '\n';
  };
  row("metric", "baseline", "prefetch");
  row("requests", baseline.requests, prefetch.requests);
  row("hits", baseline.hits, prefetch.hits);
  out << std::fixed << std::setprecision(4);
  row("hit_rate", baseline.hit_rate().value(), prefetch.hit_rate().value());
  row("prefetch_issued", baseline.prefetch_issued, prefetch.prefetch_issued);
  row("prefetch_used", baseline.prefetch_used, prefetch.prefetch_used);
  row("precision", baseline.precision().value(), prefetch.precision().value());
  row("bytes_prefetched", baseline.bytes_prefetched, prefetch.bytes_prefetched);
  row("bytes_wasted", baseline.bytes_wasted, prefetch.bytes_wasted);
  row("crawl_requests", baseline.crawl_requests, prefetch.crawl_requests);
  const double delta = (prefetch.hit_rate().value() - baseline.hit_rate().value()) * 100.0;
  out << std::setprecision(2) << "hit rate change: " << (delta >= 0 ? "+" : "") << delta << " pp\n";
  return out.str();
}

std::uint64_t search_area(std::uint64_t position, std::uint64_t page_size) {
  if (position == 0 || page_size == 0) throw std::invalid_argument("position and page size must be positive");
  return position * ((position + page_size - 1) / page_size);
}

Ratio search_area_ratio(std::uint64_t sa_prime, std::uint64_t sa) {
  if (sa == 0) throw std::invalid_argument("search area must be positive");
  return Ratio{sa_prime, sa}.reduced();
}

RelevanceListing RelevanceListing::ranked(std::span<const PageId> urls, std::uint64_t page_size) {
  if (page_size == 0) throw std::invalid_argument("page size must be positive");
  RelevanceListing l;
  l.page_size = page_size;
  for (std::size_t i = 0; i < urls.size(); ++i) l.entries.push_back({urls[i], urls.size() - i});
  return l;
}

std::size_t RelevanceListing::position_of(PageId url) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].url == url) return i + 1;
  }
  return 0;
}

RelevanceListing reposition(const RelevanceListing& listing, const RuleRepository& repo, PageId accessed) {
  if (listing.position_of(accessed) == 0) throw std::invalid_argument("accessed page is not in the listing");

  std::vector<PageId> promoted;
  for (RuleId id : repo.scan_containing(accessed)) {
    const Sequence seq = repo.rule(id).sequence();
    const auto first = std::find(seq.begin(), seq.end(), accessed);
    for (auto it = first + 1; it < seq.end(); ++it) {
      if (*it == accessed || listing.position_of(*it) == 0) continue;
      if (std::find(promoted.begin(), promoted.end(), *it) == promoted.end()) promoted.push_back(*it);
    }
  }

  std::vector<PageId> order;
  for (const auto& e : listing.entries) {
    if (std::find(promoted.begin(), promoted.end(), e.url) != promoted.end()) continue;
    order.push_back(e.url);
    if (e.url == accessed) order.insert(order.end(), promoted.begin(), promoted.end());
  }
  return RelevanceListing::ranked(order, listing.page_size);
}

}  // namespace webpf
