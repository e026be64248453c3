// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "webpf/config.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/roughset.hpp"

using namespace webpf;

namespace {

const PageId A{0}, B{1}, C{2}, D{3};

std::set<oracle::RuleTuple> tuples(const std::vector<MarkovRule>& rules) {
  std::set<oracle::RuleTuple> out;
  for (const auto& r : rules) out.emplace(r.head, r.tail, r.support, r.confidence.num(), r.confidence.den());
  return out;
}

const MarkovRule* find_rule(const std::vector<MarkovRule>& rules, const Sequence& head, const Sequence& tail) {
  for (const auto& r : rules) {
    if (r.head == head && r.tail == tail) return &r;
  }
  return nullptr;
}

}  // namespace

TEST(CountSequences, Enumeration) {
  const std::vector<Sequence> tx{{A, B, C}};
  const auto c = count_sequences(tx, 3);
  EXPECT_EQ(c.size(), 6u);
  for (const Sequence& p : {Sequence{A}, Sequence{B}, Sequence{C}, Sequence{A, B}, Sequence{B, C}, Sequence{A, B, C}}) {
    EXPECT_EQ(c.count(p), 1u);
  }
}

TEST(CountSequences, OverlapsCounted) {
  const std::vector<Sequence> tx{{A, A, A}};
  const auto c = count_sequences(tx, 2);
  EXPECT_EQ(c.count(Sequence{A}), 3u);
  EXPECT_EQ(c.count(Sequence{A, A}), 2u);
  EXPECT_EQ(c.count(Sequence{A, A, A}), 0u);
  EXPECT_EQ(c.size(), 2u);
}

TEST(CountSequences, EmptyAndBadLength) {
  EXPECT_TRUE(count_sequences(std::vector<Sequence>{}, 3).empty());
  EXPECT_THROW(count_sequences(std::vector<Sequence>{}, 1), std::invalid_argument);
}

TEST(CountSequences, MatchesQuadraticScan) {
  webpf::testing::Gen g(50);
  const auto tx = webpf::testing::random_transactions(g, 50, 6, 12);
  const auto counts = count_sequences(tx, 5);
  const auto expected = oracle::count_all(tx, 5);
  EXPECT_EQ(counts.size(), expected.size());
  for (const auto& [pattern, n] : expected) EXPECT_EQ(counts.count(pattern), n);
  for (const auto& [pattern, n] : counts) {
    EXPECT_GE(n, 1u);
    EXPECT_LE(pattern.size(), 5u);
  }
}

TEST(CountSequences, MergeIsAdditive) {
  webpf::testing::Gen g(51);
  const auto tx = webpf::testing::random_transactions(g, 40, 5, 8);
  const std::span<const Sequence> all{tx};
  auto left = count_sequences(all.first(17), 4);
  left.merge(count_sequences(all.subspan(17), 4));
  EXPECT_EQ(left, count_sequences(all, 4));
}

TEST(DynamicThreshold, Values) {
  SequenceCounts c;
  EXPECT_EQ(dynamic_threshold(c), 1u);
  c.add(Sequence{A}, 40);
  EXPECT_EQ(dynamic_threshold(c), 1u);  // length-1 patterns never count
  c.add(Sequence{A, B}, 1);
  EXPECT_EQ(dynamic_threshold(c), 1u);
  c.add(Sequence{A, B}, 5);
  EXPECT_EQ(dynamic_threshold(c), 3u);
  c.add(Sequence{B, C, D}, 7);
  EXPECT_EQ(dynamic_threshold(c), 3u);
}

TEST(DynamicThreshold, MatchesMaxScan) {
  webpf::testing::Gen g(52);
  for (int round = 0; round < 50; ++round) {
    const auto tx = webpf::testing::random_transactions(g, g.between(1, 40), g.between(1, 6), 9);
    EXPECT_EQ(dynamic_threshold(count_sequences(tx, 4)), oracle::threshold(tx, 4));
  }
}

TEST(MineRules, ConditionalRatioExample) {
  const std::vector<Sequence> tx{{A, B, C}, {A, B, C}, {A, B, D}};
  MiningParams p;
  p.min_confidence = Ratio{3, 5};
  p.min_support = 2;
  p.max_order = 2;
  p.max_tail = 1;
  const auto rules = mine_rules(count_sequences(tx, 3), p);
  const auto* abc = find_rule(rules, {A, B}, {C});
  ASSERT_NE(abc, nullptr);
  EXPECT_TRUE(abc->confidence.identical(Ratio{2, 3}));
  EXPECT_EQ(abc->support, 2u);
  EXPECT_EQ(find_rule(rules, {A, B}, {D}), nullptr);
  EXPECT_EQ(tuples(rules), oracle::mine(tx, 3, 5, 2, 2, 1));
}

TEST(MineRules, SingleSessionCertainRule) {
  const std::vector<Sequence> tx{{A, B}};
  MiningParams p;
  p.min_confidence = Ratio{1, 1};
  const auto rules = mine_rules(count_sequences(tx, 5), p);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].head, Sequence{A});
  EXPECT_EQ(rules[0].tail, Sequence{B});
  EXPECT_EQ(rules[0].confidence, Ratio(1, 1));
  EXPECT_EQ(rules[0].order(), 1u);
}

TEST(MineRules, InvalidCutoff) {
  MiningParams p;
  p.min_confidence = Ratio{0, 1};
  EXPECT_THROW(mine_rules({}, p), std::invalid_argument);
  p.min_confidence = Ratio{6, 5};
  EXPECT_THROW(mine_rules({}, p), std::invalid_argument);
}

TEST(MineRules, RuleInvariantsOnNoisyData) {
  webpf::testing::Gen g(53);
  for (int round = 0; round < 40; ++round) {
    const auto tx = webpf::testing::random_transactions(g, 30, 5, 10);
    const auto counts = count_sequences(tx, 5);
    MiningParams p;
    p.min_support = dynamic_threshold(counts);
    for (const Ratio tc : {Ratio{1, 2}, Ratio{1, 1}}) {
      p.min_confidence = tc;
      for (const auto& r : mine_rules(counts, p)) {
        EXPECT_FALSE(r.head.empty());
        EXPECT_FALSE(r.tail.empty());
        EXPECT_LE(r.head.size(), p.max_order);
        EXPECT_LE(r.tail.size(), p.max_tail);
        EXPECT_GE(r.support, p.min_support);
        EXPECT_GE(r.confidence, tc);
        EXPECT_EQ(r.support, counts.count(r.sequence()));
        EXPECT_TRUE(r.confidence.identical(Ratio{counts.count(r.sequence()), counts.count(r.head)}));
        if (tc == Ratio{1, 1}) EXPECT_EQ(counts.count(r.sequence()), counts.count(r.head));
      }
    }
  }
}

TEST(MineRules, RaisingThresholdsNeverAddsRules) {
  webpf::testing::Gen g(54);
  for (int round = 0; round < 40; ++round) {
    const auto tx = webpf::testing::random_transactions(g, 25, 4, 10);
    const auto counts = count_sequences(tx, 5);
    MiningParams loose;
    loose.min_support = 1;
    const auto base = tuples(mine_rules(counts, loose));
    MiningParams strict = loose;
    strict.min_confidence = Ratio{1, 1};
    const auto by_conf = tuples(mine_rules(counts, strict));
    strict = loose;
    strict.min_support = 3;
    const auto by_support = tuples(mine_rules(counts, strict));
    EXPECT_TRUE(std::includes(base.begin(), base.end(), by_conf.begin(), by_conf.end()));
    EXPECT_TRUE(std::includes(base.begin(), base.end(), by_support.begin(), by_support.end()));
  }
}

TEST(MineRules, NextPageConfidencesSumToAtMostOne) {
  webpf::testing::Gen g(55);
  const auto tx = webpf::testing::random_transactions(g, 60, 5, 10);
  const auto counts = count_sequences(tx, 4);
  std::map<Sequence, std::vector<Ratio>> by_head;
  for (const auto& [pattern, n] : counts) {
    if (pattern.size() < 2 || pattern.size() > 3) continue;
    const Sequence head(pattern.begin(), pattern.end() - 1);
    by_head[head].push_back(rule_confidence(head, Sequence{pattern.back()}, counts));
  }
  for (const auto& [head, confs] : by_head) {
    std::uint64_t continued = 0;
    for (const auto& c : confs) continued += c.num();
    const std::uint64_t total = counts.count(head);
    std::uint64_t final_occurrences = 0;
    for (const auto& t : tx) {
      if (t.size() >= head.size() && std::equal(head.begin(), head.end(), t.end() - static_cast<long>(head.size()))) {
        ++final_occurrences;
      }
    }
    EXPECT_EQ(continued + final_occurrences, total);
  }
}

TEST(MineRules, OracleEquivalenceWithLongRules) {
  webpf::testing::Gen g(56);
  for (int round = 0; round < 30; ++round) {
    const auto tx = webpf::testing::random_transactions(g, g.between(1, 20), g.between(1, 4), 8);
    const auto counts = count_sequences(tx, 6);
    MiningParams p;
    p.max_order = 3;
    p.max_tail = 3;
    p.min_confidence = Ratio{2, 5};
    p.min_support = dynamic_threshold(counts);
    EXPECT_EQ(tuples(mine_rules(counts, p)), oracle::mine(tx, 2, 5, p.min_support, 3, 3));
  }
}

TEST(RuleConfidence, Values) {
  SequenceCounts c;
  c.add(Sequence{A, B}, 3);
  c.add(Sequence{A, B, C}, 2);
  EXPECT_TRUE(rule_confidence(Sequence{A, B}, Sequence{C}, c).identical(Ratio{2, 3}));
  EXPECT_EQ(rule_confidence(Sequence{A, B}, Sequence{D}, c), Ratio(0, 1));
  c.add(Sequence{A, B, D}, 3);
  EXPECT_EQ(rule_confidence(Sequence{A, B}, Sequence{D}, c), Ratio(1, 1));
  EXPECT_THROW(rule_confidence(Sequence{C}, Sequence{A}, c), std::invalid_argument);
}

TEST(RuleFile, FormatAndParse) {
  PageTable pages;
  MarkovRule r{{pages.intern("/a,b"), pages.intern("/c")}, {pages.intern("/x|y")}, 2, Ratio{2, 3}};
  const std::string line = format_rule(r, pages);
  EXPECT_EQ(line, "/a%2Cb,/c|/x%7Cy|2|2/3");
  EXPECT_EQ(parse_rule(line, pages), r);
  EXPECT_THROW(parse_rule("/a|/b|2|3/3", pages), std::runtime_error);   // support != numerator
  EXPECT_THROW(parse_rule("/a|/b|0|0/3", pages), std::runtime_error);   // zero support
  EXPECT_THROW(parse_rule("/a|/b|4|4/3", pages), std::runtime_error);   // confidence above one
  EXPECT_THROW(parse_rule("/a||1|1/1", pages), std::runtime_error);
  EXPECT_THROW(parse_rule("/a|/b|1", pages), std::runtime_error);
}

TEST(RuleFile, ReadReportsLineNumber) {
  PageTable pages;
  std::istringstream in("/a|/b|1|1/1\n/a|/b|x|1/1\n");
  try {
    read_rules(in, pages);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, FourRuleFixtureMinesExactly) {
  PageTable pages;
  std::ifstream sin(std::string(WEBPF_FIXTURE_DIR) + "/four_rule_sessions.tsv");
  const auto sessions = read_session_dump(sin, pages);
  const auto cfg = load_config(std::string(WEBPF_FIXTURE_DIR) + "/four_rule_mine.toml");
  const auto q = select_quality_sessions(sessions, cfg.quality);
  const auto counts = count_sequences(q.sessions, cfg.max_pattern_length());
  MiningParams p = cfg.mining;
  p.min_support = dynamic_threshold(counts);
  const auto rules = mine_rules(counts, p);
  EXPECT_EQ(rules.size(), 4u);
  std::ostringstream out;
  write_rules(out, rules, pages);
  std::ifstream expected(std::string(WEBPF_FIXTURE_DIR) + "/four_rule_expected_rules.txt");
  std::stringstream want;
  want << expected.rdbuf();
  EXPECT_EQ(out.str(), want.str());

  std::vector<Sequence> tx;
  for (const auto& s : q.sessions) tx.push_back(s.pages());
  EXPECT_EQ(tuples(rules), oracle::mine(tx, 3, 5, oracle::threshold(tx, 3), 2, 1));
}
