// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "webpf/config.hpp"
#include "webpf/log_ingest.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/page_table.hpp"

namespace webpf::testing {

/// clean -> sessionize -> quality selection -> count -> mine, as the `mine`
/// subcommand does it.
std::vector<MarkovRule> mine_trace(std::span<const LogRecord> trace, PageTable& pages,
                                   const PipelineConfig& config = {});

}  // namespace webpf::testing
