// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <map>
#include <numeric>

#include "webpf/log_ingest.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/metrics.hpp"
#include "webpf/roughset.hpp"
#include "webpf/rule_repo.hpp"
#include "webpf/sessionizer.hpp"
#include "webpf/tracegen.hpp"

namespace {

using namespace webpf;

struct Corpus {
  std::vector<LogRecord> trace;
  PageTable pages;
  std::vector<Session> sessions;
  SequenceCounts counts;
  std::vector<MarkovRule> rules;
};

const Corpus& corpus(std::size_t requests) {
  static std::map<std::size_t, Corpus> cache;
  auto [it, fresh] = cache.try_emplace(requests);
  Corpus& c = it->second;
  if (fresh) {
    TraceGenOptions gen;
    gen.seed = 7;
    gen.requests = requests;
    c.trace = clean(generate_trace(gen).records);
    c.sessions = sessionize(c.trace, c.pages);
    c.counts = count_sequences(c.sessions, 5);
    MiningParams params;
    params.min_support = dynamic_threshold(c.counts);
    c.rules = mine_rules(c.counts, params);
  }
  return c;
}

void BM_CountSequences(benchmark::State& state) {
  const Corpus& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(count_sequences(c.sessions, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountSequences)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_MineRules(benchmark::State& state) {
  const Corpus& c = corpus(static_cast<std::size_t>(state.range(0)));
  MiningParams params;
  params.min_support = dynamic_threshold(c.counts);
  for (auto _ : state) benchmark::DoNotOptimize(mine_rules(c.counts, params));
}
BENCHMARK(BM_MineRules)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_Partition(benchmark::State& state) {
  const Corpus& c = corpus(static_cast<std::size_t>(state.range(0)));
  const InformationSystem is = build_information_system(c.sessions, Bucketing{});
  std::vector<std::size_t> all(is.attribute_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(indiscernibility_partition(is, all));
  state.counters["objects"] = static_cast<double>(is.object_count());
  state.counters["attributes"] = static_cast<double>(is.attribute_count());
}
BENCHMARK(BM_Partition)->Arg(1000)->Arg(10000);

void BM_Replay(benchmark::State& state) {
  const Corpus& c = corpus(static_cast<std::size_t>(state.range(0)));
  RuleRepository repo(c.rules);
  repo.freeze();
  PageTable pages = c.pages;
  ReplayOptions opts;
  opts.prefetch_enabled = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(replay(c.trace, repo, pages, {}, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.trace.size()));
}
BENCHMARK(BM_Replay)->Args({10000, 0})->Args({10000, 1})->Args({50000, 1});

}  // namespace

BENCHMARK_MAIN();
