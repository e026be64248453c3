// SPDX-License-Identifier: Apache-2.0
#include "webpf/tracegen.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace webpf {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

struct UserState {
  std::string ip;
  std::int64_t clock = 0;
  std::size_t pattern = 0;
  std::size_t next = 0;  // 0 = not inside a pattern
};

}  // namespace

std::string synthetic_page(std::size_t index) { return "/p" + std::to_string(index) + ".html"; }

GeneratedTrace generate_trace(const TraceGenOptions& o) {
  if (o.users == 0 || o.alphabet == 0 || o.patterns == 0 || o.pattern_length < 2) {
    throw std::invalid_argument("trace generator needs users, pages, patterns and pattern length >= 2");
  }
  Rng rng(o.seed);
  GeneratedTrace out;

  std::vector<std::vector<std::size_t>> patterns(o.patterns);
  for (auto& p : patterns) {
    for (std::size_t i = 0; i < o.pattern_length; ++i) p.push_back(rng.below(o.alphabet));
    std::vector<std::string> names;
    for (std::size_t idx : p) names.push_back(synthetic_page(idx));
    out.patterns.push_back(std::move(names));
  }

  std::vector<UserState> users(o.users);
  for (std::size_t u = 0; u < o.users; ++u) {
    users[u].ip = "10.1." + std::to_string(u / 250) + "." + std::to_string(u % 250 + 1);
    users[u].clock = o.start_epoch + static_cast<std::int64_t>(rng.below(600));
  }

  auto emit = [&](UserState& u, std::string resource, std::uint64_t bytes) {
    LogRecord r;
    r.client_ip = u.ip;
    r.timestamp = std::chrono::sys_seconds{std::chrono::seconds{u.clock}};
    r.method = "GET";
    r.resource = std::move(resource);
    r.protocol = "HTTP/1.0";
    r.status = 200;
    r.bytes = bytes;
    out.records.push_back(std::move(r));
  };

  for (std::size_t n = 0; n < o.requests; ++n) {
    UserState& u = users[rng.below(o.users)];
    if (rng.chance(o.session_break_probability)) {
      u.clock += 3600 + static_cast<std::int64_t>(rng.below(3600));
      u.next = 0;
    } else {
      u.clock += 5 + static_cast<std::int64_t>(rng.below(115));
    }

    std::size_t page = 0;
    if (u.next == 0) {
      if (rng.chance(o.follow_probability)) {
        u.pattern = rng.below(o.patterns);
        page = patterns[u.pattern][0];
        u.next = 1;
      } else {
        page = rng.below(o.alphabet);
      }
    } else if (rng.chance(o.follow_probability)) {
      page = patterns[u.pattern][u.next];
      u.next = u.next + 1 == o.pattern_length ? 0 : u.next + 1;
    } else {
      page = rng.below(o.alphabet);
      u.next = 0;
    }
    emit(u, synthetic_page(page), 512 + (page * 7919) % 8192);
    if (rng.chance(o.image_probability)) emit(u, "/img/p" + std::to_string(page) + ".gif", 2048);
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const LogRecord& a, const LogRecord& b) { return a.timestamp < b.timestamp; });
  return out;
}

}  // namespace webpf
