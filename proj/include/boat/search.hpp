#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "boat/conllu.hpp"
#include "boat/status.hpp"

namespace boat {

enum class SearchField { Form, Lemma, Upos, Xpos, Deprel, HeadDeprel, Text, Feat };
enum class MatchKind { Exact, Regex, Exists };

std::string_view search_field_name(SearchField field);

/// One condition of a query. TEXT predicates apply to the sentence text,
/// every other field to a single token.
class FieldPredicate {
 public:
  static FieldPredicate exact(SearchField field, std::string value, std::string feature = {});
  /// Throws BadRegex when the pattern does not compile.
  static FieldPredicate regex(SearchField field, std::string pattern, std::string feature = {});
  static FieldPredicate exists(SearchField field, std::string feature = {});

  SearchField field() const noexcept { return field_; }
  MatchKind kind() const noexcept { return kind_; }
  const std::string& value() const noexcept { return value_; }
  /// Attribute name for SearchField::Feat, empty otherwise.
  const std::string& feature() const noexcept { return feature_; }
  bool sentence_scoped() const noexcept { return field_ == SearchField::Text; }

  /// Whether a present field value satisfies the matcher. Exact matching is
  /// whole-value and case-sensitive; regexes match anywhere unless anchored.
  bool accepts(std::string_view value) const;
  /// Byte range of the first match inside `value`, if it is accepted.
  std::optional<std::pair<std::size_t, std::size_t>> locate(std::string_view value) const;

  /// Query-language rendering, e.g. `feats.Case=Nom` or `form~/ki$/`.
  std::string to_string() const;

 private:
  FieldPredicate(SearchField field, MatchKind kind, std::string value, std::string feature);

  SearchField field_;
  MatchKind kind_;
  std::string value_;
  std::string feature_;
  std::shared_ptr<const std::regex> regex_;
};

struct SearchQuery {
  std::vector<FieldPredicate> predicates;
  std::string treebank_id;
  std::string annotator = "base";
  std::optional<std::set<Status>> status_filter;
};

/// Parses the query mini-language:
///   FIELD=value   FIELD~/regex/   FIELD?   feats.Name=value   feats.Name~/regex/
///   feats.Name?   text~/regex/   "quoted value"   bareword (same as form=bareword)
/// Fields are FORM, LEMMA, UPOS, XPOS, DEPREL, HEAD_DEPREL, TEXT (any case).
/// Throws QuerySyntaxError or BadRegex with the offending position.
SearchQuery parse_query(std::string_view text);

struct Match {
  std::string sent_id;
  std::optional<int> token_id;  // nullopt for sentence-level (TEXT-only) hits
  std::string snippet;
  /// Byte range of the matched surface word inside `snippet`.
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Match&) const = default;
};

/// Text to display for a sentence: its "# text" or, failing that, the
/// surface words joined with SpaceAfter=No respected.
std::string sentence_snippet(const Sentence& sent);
/// Byte offsets of each token's surface word (its multiword range when it
/// has one) inside sentence_snippet().
std::vector<std::pair<std::size_t, std::size_t>> token_offsets(const Sentence& sent,
                                                               std::string_view snippet);

struct IndexedSentence {
  Sentence sentence;
  Status status = Status::New;
};

/// Inverted index over one annotation layer of a treebank: posting lists
/// from exact field values to tokens. Regex and existence predicates are
/// answered from the per-field value dictionaries.
class SearchIndex {
 public:
  SearchIndex() = default;
  explicit SearchIndex(std::vector<IndexedSentence> view);

  /// Replaces the sentence with the same sent_id (appending it when new).
  /// The result equals an index rebuilt from the updated view.
  void update(Sentence sentence, Status status);

  /// Hits in document order, then token order.
  std::vector<Match> execute(const SearchQuery& query) const;

  std::size_t sentence_count() const noexcept { return sentences_.size(); }
  const IndexedSentence& at(std::size_t position) const { return sentences_.at(position); }

  /// Number of tokens whose field holds exactly `value`.
  std::size_t posting_count(SearchField field, std::string_view value,
                            std::string_view feature = {}) const;
  /// Number of distinct (field, value) keys.
  std::size_t key_count() const noexcept { return postings_.size(); }

 private:
  struct Ref {
    std::uint32_t position;
    int token_id;
    auto operator<=>(const Ref&) const = default;
  };
  using Key = std::tuple<SearchField, std::string, std::string>;  // field, feature, value
  using Postings = std::set<Ref>;

  void add(std::uint32_t position);
  void remove(std::uint32_t position);
  template <typename Fn>
  void for_each_key(const Sentence& sent, Fn&& fn) const;
  Postings candidates(const FieldPredicate& pred) const;

  std::vector<IndexedSentence> sentences_;
  std::unordered_map<std::string, std::uint32_t> position_of_;
  std::map<Key, Postings> postings_;
};

SearchIndex build_index(std::vector<IndexedSentence> view);
SearchIndex update_index(SearchIndex index, Sentence sentence, Status status);

}  // namespace boat
