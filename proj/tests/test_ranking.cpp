#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "elan/microc/parser.hpp"
#include "elan/ranking/ranker.hpp"
#include "elan/ranking/warnings.hpp"
#include "elan/sdg/builder.hpp"
#include "support/corpus.hpp"

using namespace elan;
using namespace elan::ranking;

namespace {

NormalizedWarnings gcc(const std::string& text) {
  std::istringstream in(text);
  return normalize_warnings(in, WarningFormat::Gcc);
}

WarningRecord w(std::string file, int line, std::string msg) { return {std::move(file), line, std::move(msg), {}}; }

std::string tsv(const std::vector<RankedWarning>& r) {
  std::ostringstream os;
  write_tsv(os, r);
  return os.str();
}

}  // namespace

TEST(Normalize, SingleLine) {
  const auto n = gcc("a.mc:12: possible null deref\n");
  ASSERT_EQ(n.records.size(), 1u);
  EXPECT_EQ(n.records[0], w("a.mc", 12, "possible null deref"));
}

TEST(Normalize, EmptyInput) {
  const auto n = gcc("");
  EXPECT_TRUE(n.records.empty());
  EXPECT_EQ(n.malformed, 0u);
}

TEST(Normalize, DuplicatesCollapse) {
  const auto n = gcc("a.mc:3: x\na.mc:3: x\n");
  EXPECT_EQ(n.records.size(), 1u);
  EXPECT_EQ(n.duplicates, 1u);
}

TEST(Normalize, ColumnsAndMalformedLines) {
  const auto n = gcc("a.mc:4:7: warning: w1\nnonsense\na.mc:0: zero line\na.mc:5:\n\n  \nsub/b.mc:9: w2\r\n");
  ASSERT_EQ(n.records.size(), 2u);
  EXPECT_EQ(n.records[0], w("a.mc", 4, "warning: w1"));
  EXPECT_EQ(n.records[1], w("sub/b.mc", 9, "w2"));
  EXPECT_EQ(n.malformed, 3u);
  EXPECT_EQ(n.diagnostics.size(), 3u);
}

TEST(Normalize, JsonFormat) {
  std::ifstream in(support::fixture_path("warnings.json"));
  const auto n = normalize_warnings(in, WarningFormat::Json);
  ASSERT_EQ(n.records.size(), 4u);
  EXPECT_EQ(n.malformed, 2u);
  EXPECT_EQ(n.records[0].severity, "low");
  EXPECT_EQ(n.records[3].severity, "3");
  std::istringstream bad("{not json");
  EXPECT_THROW(normalize_warnings(bad, WarningFormat::Json), AnalysisError);
}

TEST(Rank, StrictOrderAndFileTieBreak) {
  const auto p = microc::parse_programs(
      {{"b.mc", "int main() {\n  if (c > 0) {\n    x = 1;\n  }\n  if (d > 0) {\n    if (e > 0) {\n      y = 2;\n    }\n  }\n  helper();\n}\n"},
       {"a.mc", "void helper() {\n  if (q > 0) {\n    z = 3;\n  }\n}\n"}});
  const auto g = sdg::build_sdg(p);
  const std::vector<WarningRecord> in{w("b.mc", 7, "quarter"), w("b.mc", 3, "half in b"),
                                      w("b.mc", 10, "certain"), w("a.mc", 3, "half in a"),
                                      w("b.mc", 99, "nowhere")};
  const auto r = rank(g, in);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r[0].warning.message, "certain");
  EXPECT_EQ(r[1].warning.message, "half in a");
  EXPECT_EQ(r[2].warning.message, "half in b");
  EXPECT_EQ(r[3].warning.message, "quarter");
  EXPECT_EQ(r[4].warning.message, "nowhere");
  EXPECT_EQ(*r[0].likelihood, 1.0);
  EXPECT_EQ(*r[1].likelihood, 0.5);
  EXPECT_EQ(*r[3].likelihood, 0.25);
  EXPECT_FALSE(r[4].likelihood);
  EXPECT_FALSE(r[4].vertex_id);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i].rank, static_cast<int>(i + 1));
}

TEST(Rank, DeadCodeRanksLastAmongMapped) {
  const auto p = microc::parse_program("int main() {\n  a = 1;\n  return 0;\n  b = 2;\n}\n", "d.mc");
  const auto g = sdg::build_sdg(p);
  const auto r = rank(g, {w("d.mc", 4, "dead"), w("d.mc", 77, "unmapped"), w("d.mc", 2, "live")});
  EXPECT_EQ(r[0].warning.message, "live");
  EXPECT_EQ(r[1].warning.message, "dead");
  EXPECT_EQ(*r[1].likelihood, 0.0);
  EXPECT_EQ(r[2].warning.message, "unmapped");
}

TEST(Rank, UnmappedKeepInputOrder) {
  const auto p = microc::parse_program("int main() {\n  a = 1;\n}\n", "u.mc");
  const auto g = sdg::build_sdg(p);
  const auto r = rank(g, {w("u.mc", 50, "z"), w("x.mc", 1, "a"), w("u.mc", 2, "m"), w("u.mc", 40, "b")});
  EXPECT_EQ(r[0].warning.message, "m");
  EXPECT_EQ(r[1].warning.message, "z");
  EXPECT_EQ(r[2].warning.message, "a");
  EXPECT_EQ(r[3].warning.message, "b");
}

TEST(Rank, SeverityTieBreak) {
  const auto p = microc::parse_program("int main() {\n  a = 1;\n  b = 2;\n  c = 3;\n}\n", "s.mc");
  const auto g = sdg::build_sdg(p);
  std::vector<WarningRecord> in{w("s.mc", 2, "one"), w("s.mc", 3, "two"), w("s.mc", 4, "three")};
  in[1].severity = "a-high";
  in[2].severity = "b-low";
  RankOptions opt;
  opt.tiebreak = TieBreak::Severity;
  const auto r = rank(g, in, opt);
  EXPECT_EQ(r[0].warning.message, "two");
  EXPECT_EQ(r[1].warning.message, "three");
  EXPECT_EQ(r[2].warning.message, "one");
  const auto plain = rank(g, in);
  EXPECT_EQ(plain[0].warning.message, "one");
}

TEST(Rank, PermutationAndMonotoneOnFixture) {
  const auto l = support::load_corpus("inventory");
  std::ifstream in(support::fixture_path("inventory.warnings.txt"));
  const auto n = normalize_warnings(in, WarningFormat::Gcc);
  EXPECT_EQ(n.duplicates, 1u);
  EXPECT_EQ(n.malformed, 1u);
  for (auto model : {likelihood::BranchModel::simple(), likelihood::BranchModel::heuristic()}) {
    RankOptions opt;
    opt.model = model;
    const auto r = rank(l.graph, n.records, opt);
    ASSERT_EQ(r.size(), n.records.size());
    auto key = [](const WarningRecord& x) { return std::tie(x.file, x.line, x.message); };
    std::vector<std::tuple<std::string, int, std::string>> a, b;
    for (const auto& x : r) a.emplace_back(key(x.warning));
    for (const auto& x : n.records) b.emplace_back(key(x));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    bool seen_unmapped = false;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!r[i].likelihood) {
        seen_unmapped = true;
        continue;
      }
      EXPECT_FALSE(seen_unmapped) << "mapped warning after an unmapped one";
      if (i > 0 && r[i - 1].likelihood) EXPECT_GE(*r[i - 1].likelihood, *r[i].likelihood);
    }
    EXPECT_TRUE(seen_unmapped);
    opt.jobs = 3;
    EXPECT_EQ(tsv(rank(l.graph, n.records, opt)), tsv(r));
  }
}

TEST(Output, TsvAndJson) {
  RankedWarning a{w("a.mc", 3, "tab\there"), 5, 0.123456789, 1};
  RankedWarning b{w("b.mc", 9, "lost"), std::nullopt, std::nullopt, 2};
  EXPECT_EQ(tsv({a, b}),
            "rank\tlikelihood\tfile\tline\tmessage\n"
            "1\t0.123457\ta.mc\t3\ttab here\n"
            "2\tunmapped\tb.mc\t9\tlost\n");
  const auto j = to_json({a, b});
  EXPECT_EQ(j[0]["likelihood"], 0.123457);
  EXPECT_EQ(j[0]["vertex"], 5);
  EXPECT_EQ(j[1]["likelihood"], "unmapped");
  EXPECT_TRUE(j[1]["vertex"].is_null());
}
