// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webpf/log_ingest.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/metrics.hpp"
#include "webpf/prefetch_agent.hpp"
#include "webpf/roughset.hpp"
#include "webpf/sessionizer.hpp"

namespace webpf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  struct Paths {
    std::string log;
    std::string sessions;
    std::string rules;
    std::string report;
  } paths;

  LogFormat log_format = LogFormat::kCommon;
  CleanOptions clean;
  SessionOptions session;
  QualityOptions quality;
  MiningParams mining;  // min_support is derived from the data when mining
  ReplayOptions replay;
  std::vector<GroupClientConfig> groups;
  std::uint64_t seed = 42;

  /// Longest pattern that has to be counted for the configured rule shapes.
  std::size_t max_pattern_length() const { return mining.max_order + mining.max_tail; }

  /// Throws ConfigError when a parameter is out of range.
  void validate() const;
};

/// Parses a TOML-style file: `[section]` headers (including `[group.<id>]`),
/// `key = value` lines with strings, integers, decimals, booleans and
/// single-line arrays, and `#` comments. Unknown sections and keys are errors.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);

}  // namespace webpf
