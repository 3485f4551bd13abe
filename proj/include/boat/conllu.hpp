#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace boat {

/// Compares FEATS attribute names the way canonical CoNLL-U orders them:
/// case-insensitively, with a case-sensitive tie break.
bool feature_name_less(std::string_view a, std::string_view b);

/// Attribute/value map of a FEATS column.
///
/// Entries keep the order they were given in so that a non-canonical source
/// column can be reported by the validator. Serialization is always canonical
/// and equality ignores order.
class FeatureBag {
 public:
  using Entry = std::pair<std::string, std::string>;

  FeatureBag() = default;

  /// Throws MalformedFeature on a duplicate or empty attribute name.
  static FeatureBag from_entries(std::vector<Entry> entries);

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  std::optional<std::string_view> get(std::string_view name) const;
  bool contains(std::string_view name) const { return get(name).has_value(); }

  /// Replaces the value of an existing attribute or appends a new one.
  void set(std::string name, std::string value);
  bool erase(std::string_view name);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry> canonical_entries() const;
  bool is_canonical() const;

  friend bool operator==(const FeatureBag& a, const FeatureBag& b);

 private:
  std::vector<Entry> entries_;
};

FeatureBag parse_feats(std::string_view text);
std::string serialize_feats(const FeatureBag& bag);

/// MISC column: "|"-separated items kept verbatim and in order.
struct Misc {
  std::vector<std::string> items;

  bool empty() const noexcept { return items.empty(); }
  /// Value of the first "key=value" item with the given key.
  std::optional<std::string_view> get(std::string_view key) const;

  bool operator==(const Misc&) const = default;
};

Misc parse_misc(std::string_view text);
std::string serialize_misc(const Misc& misc);

/// One entry of the DEPS column.
struct EnhancedDep {
  int head = 0;
  std::string relation;

  bool operator==(const EnhancedDep&) const = default;
};

/// DEPS column "head:rel|head:rel"; "_" is empty. Throws ParseError.
std::vector<EnhancedDep> parse_deps(std::string_view text);
std::string serialize_deps(const std::vector<EnhancedDep>& deps);

struct Token {
  int id = 0;
  std::string form;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  std::optional<std::string> xpos;
  FeatureBag feats;
  std::optional<int> head;  // 0 attaches to the root
  std::optional<std::string> deprel;
  std::vector<EnhancedDep> deps;
  Misc misc;

  bool operator==(const Token&) const = default;
};

/// Range row ("4-5 yoktu") covering several syntactic tokens.
struct MultiwordToken {
  int first_id = 0;
  int last_id = 0;
  std::string form;
  Misc misc;

  bool covers(int id) const noexcept { return id >= first_id && id <= last_id; }
  bool operator==(const MultiwordToken&) const = default;
};

struct Sentence {
  std::string sent_id;
  std::string text;
  /// Raw comment lines, including "# sent_id" and "# text", without newline.
  std::vector<std::string> comments;
  std::vector<Token> tokens;
  std::vector<MultiwordToken> mwts;

  std::size_t size() const noexcept { return tokens.size(); }
  /// Token with the given 1-based id, or nullptr.
  const Token* find(int id) const noexcept;
  const MultiwordToken* mwt_covering(int id) const noexcept;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

/// Parses a whole CoNLL-U file. Accepts LF and CRLF line endings.
/// Throws ParseError carrying the offending line number.
Document parse_document(std::string_view text);

/// Parses one sentence block (comment and token lines, no blank lines).
/// `first_line` offsets reported line numbers; `fallback_id` is used as
/// sent_id when the block has no "# sent_id" comment.
Sentence parse_sentence(std::string_view block, std::size_t first_line = 1,
                        std::string fallback_id = "1");

/// Splits CoNLL-U text into LF-normalized sentence blocks, each ending with
/// "\n\n", paired with the line number its first line had in the input.
std::vector<std::pair<std::string, std::size_t>> split_blocks(std::string_view text);

std::string serialize_document(const Document& doc);
/// One sentence block, terminated by the separating blank line.
std::string serialize_sentence(const Sentence& sent);
std::string serialize_token(const Token& token);

/// Describes the first structural defect of a sentence, if any: ids not
/// exactly 1..n, empty or tab-bearing fields, malformed or overlapping
/// multiword ranges.
std::optional<std::string> find_sentence_defect(const Sentence& sent);
/// Throws InvalidSentence when find_sentence_defect() reports a defect.
void check_sentence(const Sentence& sent);

/// Surface words with multiword ranges collapsed to their covering form.
std::vector<std::string> surface_forms(const Sentence& sent);

/// Replaces token `id` by one token per part and records the original form
/// as a multiword range. The first part keeps the annotations; the others
/// start unset. Ids, heads and DEPS after the split point are shifted.
Sentence split_token(const Sentence& sent, int id, std::span<const std::string> parts);

/// Collapses tokens [first_id, last_id] into one token that keeps the first
/// token's annotations. Without an explicit form, a multiword range matching
/// the span exactly supplies it; otherwise the parts are concatenated.
/// A range that exactly matches a multiword token removes that range.
Sentence join_tokens(const Sentence& sent, int first_id, int last_id,
                     std::optional<std::string> joined_form = std::nullopt);

}  // namespace boat
