#include <gtest/gtest.h>

#include "boat/conllu.hpp"
#include "boat/errors.hpp"
#include "boat/search.hpp"
#include "generators.hpp"

using namespace boat;
using boat::testing::Rng;

namespace {

const char* kDoc =
    "# sent_id = a\n"
    "# text = Sel sularında neler yoktu ki...\n"
    "1\tSel\tsel\tNOUN\t_\tCase=Nom|Number=Sing\t2\tnmod:poss\t_\t_\n"
    "2\tsularında\tsu\tNOUN\t_\tCase=Loc|Number=Plur\t4\tobl\t_\t_\n"
    "3\tneler\tne\tPRON\t_\tCase=Nom|PronType=Int\t4\tnsubj\t_\t_\n"
    "4-5\tyoktu\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "4\tyok\tyok\tADJ\t_\tPolarity=Neg\t0\troot\t_\t_\n"
    "5\ttu\ti\tAUX\t_\tTense=Past\t4\tcop\t_\t_\n"
    "6\tki\tki\tPART\t_\t_\t4\tdiscourse\t_\tSpaceAfter=No\n"
    "7\t...\t...\tPUNCT\t_\t_\t4\tpunct\t_\t_\n"
    "\n"
    "# sent_id = b\n"
    "1\tEv\tev\tNOUN\t_\tCase=Nom\t2\tnsubj\t_\t_\n"
    "2\tgeldi\tgel\tVERB\t_\tTense=Past\t0\troot\t_\tSpaceAfter=No\n"
    "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
    "\n";

std::vector<IndexedSentence> view_of(const std::string& text) {
  std::vector<IndexedSentence> view;
  for (auto& s : parse_document(text).sentences) view.push_back({std::move(s), Status::New});
  return view;
}

std::vector<std::pair<std::string, int>> ids(const std::vector<Match>& matches) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& m : matches) out.emplace_back(m.sent_id, m.token_id.value_or(0));
  return out;
}

std::vector<Match> run(const SearchIndex& index, const std::string& text) {
  return index.execute(parse_query(text));
}

}  // namespace

TEST(QueryParser, ParsesEveryForm) {
  const auto q = parse_query(R"(UPOS=VERB feats.Tense=Past form~/ki$/ lemma? "a b" yok text~/a\/b/)");
  ASSERT_EQ(q.predicates.size(), 7u);
  EXPECT_EQ(q.predicates[0].field(), SearchField::Upos);
  EXPECT_EQ(q.predicates[0].value(), "VERB");
  EXPECT_EQ(q.predicates[1].field(), SearchField::Feat);
  EXPECT_EQ(q.predicates[1].feature(), "Tense");
  EXPECT_EQ(q.predicates[2].kind(), MatchKind::Regex);
  EXPECT_EQ(q.predicates[3].kind(), MatchKind::Exists);
  EXPECT_EQ(q.predicates[4].value(), "a b");
  EXPECT_EQ(q.predicates[5].field(), SearchField::Form);
  EXPECT_EQ(q.predicates[5].value(), "yok");
  EXPECT_EQ(q.predicates[6].field(), SearchField::Text);
  EXPECT_EQ(q.predicates[6].value(), "a/b");
  EXPECT_EQ(q.annotator, "base");
}

TEST(QueryParser, ReportsPositions) {
  const auto position_of = [](const std::string& text) -> std::pair<ErrorCode, std::size_t> {
    try {
      parse_query(text);
    } catch (const QuerySyntaxError& e) {
      return {e.code(), e.position()};
    }
    return {ErrorCode::StorageError, 0};
  };
  EXPECT_EQ(position_of("upos=NOUN bogus=x"), std::make_pair(ErrorCode::QuerySyntaxError, std::size_t{10}));
  EXPECT_EQ(position_of("form~/[a/"), std::make_pair(ErrorCode::BadRegex, std::size_t{5}));
  EXPECT_EQ(position_of("form~/abc"), std::make_pair(ErrorCode::QuerySyntaxError, std::size_t{5}));
  EXPECT_EQ(position_of("upos="), std::make_pair(ErrorCode::QuerySyntaxError, std::size_t{5}));
  EXPECT_EQ(position_of("   ").first, ErrorCode::QuerySyntaxError);
}

TEST(QueryParser, ToStringRoundTrips) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = boat::testing::random_predicate(rng);
    const auto back = parse_query(p.to_string());
    ASSERT_EQ(back.predicates.size(), 1u);
    EXPECT_EQ(back.predicates[0].field(), p.field());
    EXPECT_EQ(back.predicates[0].kind(), p.kind());
    EXPECT_EQ(back.predicates[0].value(), p.value());
    EXPECT_EQ(back.predicates[0].feature(), p.feature());
  }
  EXPECT_EQ(FieldPredicate::exact(SearchField::Form, "a \"b\"").to_string(), R"(form="a \"b\"")");
}

TEST(SearchIndex, ExactRegexExistsAndFeatures) {
  const SearchIndex index(view_of(kDoc));
  EXPECT_EQ(ids(run(index, "upos=NOUN")),
            (std::vector<std::pair<std::string, int>>{{"a", 1}, {"a", 2}, {"b", 1}}));
  EXPECT_EQ(ids(run(index, "feats.Case=Nom upos=PRON")), (std::vector<std::pair<std::string, int>>{{"a", 3}}));
  EXPECT_EQ(ids(run(index, "form~/^s/")), (std::vector<std::pair<std::string, int>>{{"a", 2}}));
  EXPECT_EQ(ids(run(index, "feats.Polarity?")), (std::vector<std::pair<std::string, int>>{{"a", 4}}));
  EXPECT_EQ(ids(run(index, "feats.Tense=Past")), (std::vector<std::pair<std::string, int>>{{"a", 5}, {"b", 2}}));
  EXPECT_TRUE(run(index, "upos=NOUN upos=VERB").empty());
  EXPECT_EQ(index.posting_count(SearchField::Upos, "NOUN"), 3u);
  EXPECT_EQ(index.posting_count(SearchField::Feat, "Nom", "Case"), 3u);
}

TEST(SearchIndex, HeadDeprelFollowsTheHead) {
  const SearchIndex index(view_of(kDoc));
  EXPECT_EQ(ids(run(index, "head_deprel=root upos=NOUN")),
            (std::vector<std::pair<std::string, int>>{{"a", 2}, {"b", 1}}));
  EXPECT_EQ(ids(run(index, "head_deprel=obl")), (std::vector<std::pair<std::string, int>>{{"a", 1}}));
}

TEST(SearchIndex, SnippetsHighlightTheSurfaceWord) {
  const SearchIndex index(view_of(kDoc));
  const auto hits = run(index, "form=tu");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].snippet, "Sel sularında neler yoktu ki...");
  EXPECT_EQ(hits[0].snippet.substr(hits[0].begin, hits[0].end - hits[0].begin), "yoktu");

  const auto glued = run(index, "upos=VERB");
  ASSERT_EQ(glued.size(), 1u);
  EXPECT_EQ(glued[0].snippet, "Ev geldi.");  // no "# text": rebuilt with SpaceAfter=No
  EXPECT_EQ(glued[0].snippet.substr(glued[0].begin, glued[0].end - glued[0].begin), "geldi");
}

TEST(SearchIndex, TextQueriesAreSentenceLevel) {
  const SearchIndex index(view_of(kDoc));
  const auto hits = run(index, "text~/yok/");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].sent_id, "a");
  EXPECT_FALSE(hits[0].token_id);
  EXPECT_EQ(hits[0].snippet.substr(hits[0].begin, hits[0].end - hits[0].begin), "yok");
  EXPECT_EQ(ids(run(index, "text~/yok/ upos=ADJ")), (std::vector<std::pair<std::string, int>>{{"a", 4}}));
}

TEST(SearchIndex, StatusFilter) {
  auto view = view_of(kDoc);
  view[1].status = Status::Complete;
  const SearchIndex index(view);
  auto query = parse_query("upos=NOUN");
  query.status_filter = std::set<Status>{Status::Complete};
  EXPECT_EQ(ids(index.execute(query)), (std::vector<std::pair<std::string, int>>{{"b", 1}}));
}

TEST(SearchIndex, MatchesBruteForceBeforeAndAfterEdits) {
  Rng rng(21);
  std::vector<IndexedSentence> view;
  for (int i = 0; i < 120; ++i) {
    view.push_back({boat::testing::random_tree(rng, std::uniform_int_distribution<int>(1, 10)(rng),
                                               "s" + std::to_string(i)),
                    Status::New});
  }
  SearchIndex index(view);
  const auto check = [&](int rounds) {
    for (int q = 0; q < rounds; ++q) {
      SearchQuery query;
      const int terms = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int t = 0; t < terms; ++t) query.predicates.push_back(boat::testing::random_predicate(rng));
      ASSERT_EQ(ids(index.execute(query)), boat::testing::brute_force_search(view, query.predicates));
    }
  };
  check(100);
  for (int e = 0; e < 30; ++e) {
    const auto pos = std::uniform_int_distribution<std::size_t>(0, view.size() - 1)(rng);
    auto replacement = boat::testing::random_tree(rng, std::uniform_int_distribution<int>(1, 10)(rng),
                                                  view[pos].sentence.sent_id);
    view[pos] = {replacement, Status::Draft};
    index.update(replacement, Status::Draft);
  }
  check(100);
  const SearchIndex rebuilt(view);
  EXPECT_EQ(index.key_count(), rebuilt.key_count());
}
