#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "apisum/apix.hpp"
#include "apisum/errors.hpp"
#include "entity_cases.hpp"
#include "test_support.hpp"

namespace apisum::apix {
namespace {

// A rotation question in the shape of a typical post: two lifecycle methods,
// a manifest attribute and a class definition.
constexpr const char* kRotationPost =
    "<p>My activity loses its counter whenever the device is rotated. I save it in "
    "<code>onSaveInstanceState()</code> and read it back in <code>onRestoreInstanceState()</code>, "
    "but the value is still reset.</p>"
    "<p>Adding <code>android:configChanges=&quot;orientation|screenSize&quot;</code> to the manifest "
    "did not help either.</p>"
    "<pre><code>public class MainActivity extends Activity {\n"
    "    private int counter;\n"
    "}\n</code></pre>";

EntityFilterConfig defaults() {
  EntityFilterConfig cfg;
  cfg.denylist = default_denylist();
  cfg.qualifiers = default_qualifier_map();
  return cfg;
}

ingest::RawPost post(std::int64_t id, bool question, std::string body) {
  ingest::RawPost p;
  p.id = id;
  p.post_type = question ? ingest::PostType::question : ingest::PostType::answer;
  if (!question) p.parent_id = 1;
  if (question) p.title = "t";
  p.body_html = std::move(body);
  return p;
}

TEST(ExtractCodeEntities, InlineSpan) {
  const auto e = extract_code_entities("<p>use <code>onCreate()</code></p>", 5);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].raw_text, "onCreate()");
  EXPECT_EQ(e[0].kind, SnippetKind::inline_span);
  EXPECT_EQ(e[0].source_post_id, 5);
}

TEST(ExtractCodeEntities, NewlineMeansBlock) {
  const auto e = extract_code_entities("<pre><code>class X {\n}</code></pre>");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].raw_text, "class X {\n}");
  EXPECT_EQ(e[0].kind, SnippetKind::block);
}

TEST(ExtractCodeEntities, LengthCapMeansBlock) {
  const std::string long_code(121, 'a');
  EXPECT_EQ(extract_code_entities("<code>" + long_code + "</code>")[0].kind, SnippetKind::block);
  EXPECT_EQ(extract_code_entities("<code>" + long_code + "</code>", 0, 200)[0].kind,
            SnippetKind::inline_span);
}

TEST(ExtractCodeEntities, RotationPost) {
  const auto e = extract_code_entities(kRotationPost);
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[0].raw_text, "onSaveInstanceState()");
  EXPECT_EQ(e[1].raw_text, "onRestoreInstanceState()");
  EXPECT_EQ(e[2].raw_text, "android:configChanges=\"orientation|screenSize\"");
  for (int i = 0; i < 3; ++i) EXPECT_EQ(e[i].kind, SnippetKind::inline_span);
  EXPECT_EQ(e[3].kind, SnippetKind::block);
  EXPECT_EQ(e[3].raw_text.rfind("public class MainActivity", 0), 0u);

  const auto cfg = defaults();
  EXPECT_EQ(validate_entity(e[0], cfg), Classification::method);
  EXPECT_EQ(validate_entity(e[1], cfg), Classification::method);
  EXPECT_EQ(validate_entity(e[2], cfg), Classification::rejected);
  EXPECT_EQ(validate_entity(e[3], cfg), Classification::rejected);
}

TEST(ValidateEntity, FixtureTable) {
  const auto cfg = defaults();
  for (const auto& c : apisum::testing::entity_cases()) {
    EXPECT_EQ(validate_entity({c.raw, 0, c.kind}, cfg), c.expected) << c.raw;
  }
}

TEST(ValidateEntity, BareNamesNeedTheFlag) {
  auto cfg = defaults();
  EXPECT_EQ(validate_entity({"notifyDataSetChanged", 0, SnippetKind::inline_span}, cfg),
            Classification::rejected);
  cfg.assume_method_without_parens = true;
  EXPECT_EQ(validate_entity({"notifyDataSetChanged", 0, SnippetKind::inline_span}, cfg),
            Classification::method);
  EXPECT_EQ(validate_entity({"Activity", 0, SnippetKind::inline_span}, cfg), Classification::rejected);
}

TEST(NormalizeEntity, StripsArguments) {
  EXPECT_EQ(normalize_entity("onCreate(Bundle savedInstanceState)"), "onCreate()");
  EXPECT_EQ(normalize_entity("app.Activity.onCreate()"), "app.Activity.onCreate()");
  EXPECT_EQ(normalize_entity("  a.b(c(d), e)  "), "a.b()");
  EXPECT_EQ(normalize_entity("finish"), "finish");
  EXPECT_EQ(normalize_entity("finish", true), "finish()");
}

TEST(NormalizeEntity, Unbalanced) {
  EXPECT_THROW(normalize_entity("finish("), UnbalancedParens);
  EXPECT_THROW(normalize_entity("a)b("), UnbalancedParens);
}

TEST(LooksLikeFile, MatchesStdRegexOnShortStrings) {
  const std::regex reference(R"(^(/?\w*)*\.\w+$)");
  const std::string alphabet = "a_1./(";
  std::mt19937 rng(11);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng() % 8);
    for (int k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    EXPECT_EQ(looks_like_file(s), std::regex_match(s, reference)) << "'" << s << "'";
  }
}

TEST(SimpleNameAndQualify, MergesIntoMappedName) {
  const auto cfg = defaults();
  EXPECT_EQ(simple_name("app.Activity.onCreate()"), "onCreate()");
  EXPECT_EQ(qualify("onCreate()", cfg), "app.Activity.onCreate()");
  EXPECT_EQ(qualify("Activity.onCreate()", cfg), "app.Activity.onCreate()");
  EXPECT_EQ(qualify("app.Activity.onCreate()", cfg), "app.Activity.onCreate()");
  EXPECT_EQ(qualify("Fragment.onCreate()", cfg), "Fragment.onCreate()");
  EXPECT_EQ(qualify("unmapped()", cfg), "unmapped()");
}

TEST(CountMentions, QuestionAndAnswerSplit) {
  const ingest::Dataset ds({post(1, true, "<code>fooBar()</code>"),
                            post(2, false, "<p><code>fooBar(x)</code></p>"),
                            post(3, false, "<code>fooBar()</code>")});
  const auto stats = count_mentions(ds, defaults());
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0], (ApiMethodStats{"fooBar()", 1, 2, 3}));
}

TEST(CountMentions, RepeatedInOneAnswer) {
  const ingest::Dataset ds({post(1, true, ""), post(2, false, "<code>fooBar()</code> and <code>fooBar()</code>")});
  const auto stats = count_mentions(ds, defaults());
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].answer_mentions, 2u);
}

TEST(CountMentions, BlocksOnlyWithFlag) {
  const ingest::Dataset ds(
      {post(1, true, "<pre><code>if (x) {\n  fooBar(1);\n  new Thing(2);\n}</code></pre>")});
  auto cfg = defaults();
  EXPECT_TRUE(count_mentions(ds, cfg).empty());
  cfg.count_blocks = true;
  const auto stats = count_mentions(ds, cfg);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].name, "fooBar()");
}

TEST(CountMentions, FixtureProperties) {
  const auto ds = apisum::testing::fixture_dataset();
  const auto cfg = defaults();
  const auto stats = count_mentions(ds, cfg);
  const std::regex name_re(R"(^[A-Za-z0-9_.]+\(\)$)");
  std::map<std::string, std::uint64_t> per_post_sum;
  for (const auto& p : ds.posts()) {
    for (const auto& m : method_mentions(p.body_html, cfg)) ++per_post_sum[m];
  }
  for (const auto& s : stats) {
    EXPECT_TRUE(std::regex_match(s.name, name_re)) << s.name;
    EXPECT_EQ(s.total, s.question_mentions + s.answer_mentions);
    EXPECT_EQ(per_post_sum[s.name], s.total) << s.name;
  }
  const auto top = rank_top_k(stats, cfg);
  ASSERT_GE(top.size(), 2u);
  EXPECT_EQ(top[0].name, "fakeMethod()");
  EXPECT_EQ(top[1].name, "otherHelper()");
}

TEST(RankTopK, TieBreakByName) {
  EntityFilterConfig cfg;
  cfg.top_k = 2;
  const auto top = rank_top_k({{"c()", 0, 2, 2}, {"b()", 0, 5, 5}, {"a()", 0, 5, 5}}, cfg);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].name, "a()");
  EXPECT_EQ(top[1].name, "b()");
}

TEST(RankTopK, DenylistedRemoved) {
  EntityFilterConfig cfg;
  cfg.top_k = 1;
  cfg.denylist = {"x()"};
  EXPECT_TRUE(rank_top_k({{"x()", 0, 9, 9}}, cfg).empty());
  cfg.top_k = 0;
  EXPECT_THROW(rank_top_k({}, cfg), Error);
}

TEST(DataFiles, DenylistAndQualifierMap) {
  const auto deny = parse_denylist("# comment\nActivity\n\n  TextView  \n");
  EXPECT_EQ(deny, (std::set<std::string>{"Activity", "TextView"}));
  const auto map = parse_qualifier_map("# c\nonCreate()\tapp.Activity.onCreate()\n");
  EXPECT_EQ(map.at("onCreate()"), "app.Activity.onCreate()");
  EXPECT_THROW(parse_qualifier_map("no tab here\n"), FormatError);
  EXPECT_EQ(default_qualifier_map().size(), 15u);
  EXPECT_TRUE(default_denylist().count("Activity"));
}

TEST(StatsJson, RoundTrip) {
  const std::vector<ApiMethodStats> stats{{"a.b()", 1, 2, 3}, {"c()", 0, 1, 1}};
  EXPECT_EQ(stats_from_json(stats_to_json(stats)), stats);
}

}  // namespace
}  // namespace apisum::apix
