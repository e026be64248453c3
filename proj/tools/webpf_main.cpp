// SPDX-License-Identifier: Apache-2.0
//
// webpf: mine prefetch rules from access logs and replay traces against them.
//
//   webpf gen      --out trace.log [--seed N --requests N ...]
//   webpf ingest   --log access.log --sessions-out sessions.tsv
//   webpf mine     --log access.log --rules-out rules.txt
//   webpf simulate --trace access.log --rules rules.txt --prefetch on --report-out report.json
//   webpf report   --baseline base.json --prefetch pf.json --out table.txt
//
// Exit codes: 0 ok, 1 input error, 2 configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "webpf/config.hpp"
#include "webpf/log_ingest.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/metrics.hpp"
#include "webpf/roughset.hpp"
#include "webpf/rule_repo.hpp"
#include "webpf/sessionizer.hpp"
#include "webpf/tracegen.hpp"

namespace {

using namespace webpf;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kConfigError = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IngestFlags {
  std::string log_format;
  std::vector<std::string> ignore_suffixes;
  std::vector<int> keep_status;
  std::int64_t gap_seconds = 0;
};

struct Options {
  std::string config;
  IngestFlags ingest;

  std::string log, sessions, rules, trace;
  std::string sessions_out, diagnostics_out, rules_out, report_out, csv_out;
  std::string baseline, prefetch_report, out;

  std::string t_c;
  std::size_t max_order = 0, max_tail = 0;
  double target_quantile = -1;
  bool strict = false;

  std::string prefetch = "on";
  std::size_t cache_capacity = 0;

  TraceGenOptions gen;
  bool seed_given = false;
};

void add_ingest_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--log-format", o.ingest.log_format, "common | combined")->check(CLI::IsMember({"common", "clf", "combined"}));
  cmd->add_option("--ignore-suffixes", o.ingest.ignore_suffixes, "Resource suffixes to drop (replaces the default set)")
      ->delimiter(',');
  cmd->add_option("--keep-status", o.ingest.keep_status, "Status classes to keep, e.g. 2,3")->delimiter(',');
  cmd->add_option("--gap-seconds", o.ingest.gap_seconds, "Session inactivity timeout");
}

PipelineConfig load(const Options& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (!o.ingest.log_format.empty()) cfg.log_format = parse_log_format(o.ingest.log_format);
  if (!o.ingest.ignore_suffixes.empty()) {
    cfg.clean.ignore_suffixes = {o.ingest.ignore_suffixes.begin(), o.ingest.ignore_suffixes.end()};
  }
  if (!o.ingest.keep_status.empty()) cfg.clean.keep_status_classes = {o.ingest.keep_status.begin(), o.ingest.keep_status.end()};
  if (o.ingest.gap_seconds != 0) cfg.session.gap = std::chrono::seconds{o.ingest.gap_seconds};
  if (!o.t_c.empty()) {
    try {
      cfg.mining.min_confidence = Ratio::parse(o.t_c);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--t-c: ") + e.what());
    }
  }
  if (o.max_order != 0) cfg.mining.max_order = o.max_order;
  if (o.max_tail != 0) cfg.mining.max_tail = o.max_tail;
  if (o.target_quantile >= 0) cfg.quality.target_quantile = o.target_quantile;
  if (o.cache_capacity != 0) cfg.replay.cache_capacity = o.cache_capacity;
  if (o.seed_given) cfg.seed = o.gen.seed;
  cfg.validate();
  return cfg;
}

std::string pick(const std::string& flag, const std::string& from_config, const char* what) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw ConfigError(std::string("no path given for ") + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

std::vector<LogRecord> read_clean_log(const std::string& path, const PipelineConfig& cfg,
                                      std::vector<LineDiagnostic>* diagnostics = nullptr) {
  auto in = open_in(path);
  ParseResult parsed = parse_log(in, cfg.log_format);
  if (diagnostics) *diagnostics = parsed.diagnostics;
  else if (!parsed.diagnostics.empty()) {
    std::cerr << path << ": " << parsed.diagnostics.size() << " malformed line(s) skipped\n";
  }
  return clean(parsed.records, cfg.clean);
}

int run_ingest(const Options& o) {
  const PipelineConfig cfg = load(o);
  const std::string log_path = pick(o.log, cfg.paths.log, "--log");
  std::vector<LineDiagnostic> diagnostics;
  const auto records = read_clean_log(log_path, cfg, &diagnostics);
  PageTable pages;
  const auto sessions = sessionize(records, pages, cfg.session);

  auto out = open_out(pick(o.sessions_out, cfg.paths.sessions, "--sessions-out"));
  write_session_dump(out, sessions, pages);

  if (!o.diagnostics_out.empty()) {
    auto diag = open_out(o.diagnostics_out);
    for (const auto& d : diagnostics) diag << d.line << '\t' << d.reason << '\n';
  } else {
    for (const auto& d : diagnostics) std::cerr << log_path << ":" << d.line << ": " << d.reason << '\n';
  }
  std::cout << "records " << records.size() << ", sessions " << sessions.size() << ", malformed lines "
            << diagnostics.size() << '\n';
  return kOk;
}

int run_mine(const Options& o) {
  const PipelineConfig cfg = load(o);
  PageTable pages;
  std::vector<Session> sessions;
  if (!o.sessions.empty()) {
    auto in = open_in(o.sessions);
    try {
      sessions = read_session_dump(in, pages);
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
  } else {
    const auto records = read_clean_log(pick(o.log, cfg.paths.log, "--log or --sessions"), cfg);
    sessions = sessionize(records, pages, cfg.session);
  }

  std::vector<MarkovRule> rules;
  if (!sessions.empty()) {
    const QualitySelection quality = select_quality_sessions(sessions, cfg.quality);
    if (quality.fallback) {
      std::cerr << "warning: lower approximation is empty, mining the raw target set ("
                << quality.target.size() << " sessions)\n";
      if (o.strict) return kInputError;
    }
    const SequenceCounts counts = count_sequences(quality.sessions, cfg.max_pattern_length());
    MiningParams params = cfg.mining;
    params.min_support = dynamic_threshold(counts);
    rules = mine_rules(counts, params);
    std::cout << "sessions " << sessions.size() << ", quality sessions " << quality.sessions.size()
              << ", min support " << params.min_support << ", rules " << rules.size() << '\n';
  } else {
    std::cerr << "warning: no sessions, writing an empty rule file\n";
    if (o.strict) return kInputError;
  }

  auto out = open_out(pick(o.rules_out, cfg.paths.rules, "--rules-out"));
  write_rules(out, rules, pages);
  return kOk;
}

int run_simulate(const Options& o) {
  const PipelineConfig cfg = load(o);
  if (o.prefetch != "on" && o.prefetch != "off") throw ConfigError("--prefetch must be on or off");
  PageTable pages;
  RuleRepository repo;
  {
    auto in = open_in(pick(o.rules, cfg.paths.rules, "--rules"));
    try {
      repo = RuleRepository::load(in, pages);
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
  }
  repo.freeze();
  const auto trace = read_clean_log(pick(o.trace, cfg.paths.log, "--trace"), cfg);
  ReplayOptions options = cfg.replay;
  options.session_gap = cfg.session.gap;
  options.prefetch_enabled = o.prefetch == "on";
  const SimReport report = replay(trace, repo, pages, cfg.groups, options);

  auto out = open_out(pick(o.report_out, cfg.paths.report, "--report-out"));
  out << report_to_json(report);
  if (!o.csv_out.empty()) open_out(o.csv_out) << report_to_csv(report);
  std::cout << "requests " << report.requests << ", hit rate " << report.hit_rate().value() << ", precision "
            << report.precision().value() << '\n';
  return kOk;
}

SimReport read_report(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return report_from_json(buf.str());
  } catch (const std::runtime_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

int run_report(const Options& o) {
  const std::string table = render_comparison(read_report(o.baseline), read_report(o.prefetch_report));
  open_out(o.out) << table;
  return kOk;
}

int run_gen(const Options& o) {
  TraceGenOptions gen = o.gen;
  if (!o.seed_given && !o.config.empty()) gen.seed = load_config(o.config).seed;
  const GeneratedTrace trace = generate_trace(gen);
  auto out = open_out(o.out);
  for (const auto& r : trace.records) out << render_line(r) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-rule web prefetching: log mining and trace replay"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Parse, clean and sessionize an access log");
  ingest->add_option("--config", o.config, "Pipeline config file");
  ingest->add_option("--log", o.log, "Access log");
  ingest->add_option("--sessions-out", o.sessions_out, "Session dump to write");
  ingest->add_option("--diagnostics-out", o.diagnostics_out, "Per-line parse errors (line<TAB>reason)");
  add_ingest_flags(ingest, o);

  auto* mine = app.add_subcommand("mine", "Mine Markov prefetch rules");
  mine->add_option("--config", o.config, "Pipeline config file");
  auto* mine_log = mine->add_option("--log", o.log, "Access log");
  auto* mine_sessions = mine->add_option("--sessions", o.sessions, "Session dump from `ingest`");
  mine_log->excludes(mine_sessions);
  mine->add_option("--rules-out", o.rules_out, "Rule file to write");
  mine->add_option("--t-c", o.t_c, "Confidence cut-off, e.g. 1/2 or 0.6");
  mine->add_option("--max-order", o.max_order, "Longest rule head");
  mine->add_option("--max-tail", o.max_tail, "Longest rule tail");
  mine->add_option("--target-quantile", o.target_quantile, "Dwell quantile defining the target sessions");
  mine->add_flag("--strict", o.strict, "Fail when no quality sessions are found");
  add_ingest_flags(mine, o);

  auto* simulate = app.add_subcommand("simulate", "Replay a trace through the agents and caches");
  simulate->add_option("--config", o.config, "Pipeline config file");
  simulate->add_option("--trace", o.trace, "Access log to replay");
  simulate->add_option("--rules", o.rules, "Rule file");
  simulate->add_option("--prefetch", o.prefetch, "on | off")->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--report-out", o.report_out, "JSON report to write");
  simulate->add_option("--csv-out", o.csv_out, "CSV report to write");
  simulate->add_option("--cache-capacity", o.cache_capacity, "Cache entries per client");
  add_ingest_flags(simulate, o);

  auto* report = app.add_subcommand("report", "Compare a baseline and a prefetching report");
  report->add_option("--baseline", o.baseline, "Report from --prefetch off")->required();
  report->add_option("--prefetch", o.prefetch_report, "Report from --prefetch on")->required();
  report->add_option("--out", o.out, "Table to write")->required();

  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace with planted patterns");
  gen->add_option("--config", o.config, "Pipeline config file (for the seed)");
  gen->add_option("--out", o.out, "Log file to write")->required();
  gen->add_option("--seed", o.gen.seed, "Random seed")->each([&](const std::string&) { o.seed_given = true; });
  gen->add_option("--requests", o.gen.requests, "Number of page requests");
  gen->add_option("--users", o.gen.users, "Number of clients");
  gen->add_option("--alphabet", o.gen.alphabet, "Number of distinct pages");
  gen->add_option("--patterns", o.gen.patterns, "Number of planted patterns");
  gen->add_option("--pattern-length", o.gen.pattern_length, "Pages per pattern");
  gen->add_option("--follow", o.gen.follow_probability, "Pattern-follow probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--session-breaks", o.gen.session_break_probability, "Probability of a long idle gap")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--images", o.gen.image_probability, "Probability of an embedded image request")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*ingest) return run_ingest(o);
    if (*mine) return run_mine(o);
    if (*simulate) return run_simulate(o);
    if (*report) return run_report(o);
    if (*gen) return run_gen(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
