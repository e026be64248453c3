// SPDX-License-Identifier: Apache-2.0
#include "pipeline.hpp"

#include "webpf/roughset.hpp"
#include "webpf/sessionizer.hpp"

namespace webpf::testing {

std::vector<MarkovRule> mine_trace(std::span<const LogRecord> trace, PageTable& pages, const PipelineConfig& config) {
  const auto cleaned = clean(trace, config.clean);
  const auto sessions = sessionize(cleaned, pages, config.session);
  if (sessions.empty()) return {};
  const auto quality = select_quality_sessions(sessions, config.quality);
  const auto counts = count_sequences(quality.sessions, config.max_pattern_length());
  MiningParams params = config.mining;
  params.min_support = dynamic_threshold(counts);
  return mine_rules(counts, params);
}

}  // namespace webpf::testing
