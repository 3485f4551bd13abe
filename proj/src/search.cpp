#include "boat/search.hpp"

#include <algorithm>
#include <cctype>

#include "boat/errors.hpp"

namespace boat {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::optional<SearchField> field_from_name(std::string_view name) {
  const auto key = lower(name);
  if (key == "form") return SearchField::Form;
  if (key == "lemma") return SearchField::Lemma;
  if (key == "upos") return SearchField::Upos;
  if (key == "xpos") return SearchField::Xpos;
  if (key == "deprel") return SearchField::Deprel;
  if (key == "head_deprel") return SearchField::HeadDeprel;
  if (key == "text") return SearchField::Text;
  return std::nullopt;
}

std::optional<std::string_view> head_deprel(const Sentence& sent, const Token& token) {
  if (!token.head || *token.head < 1) return std::nullopt;
  const Token* head = sent.find(*token.head);
  if (head == nullptr || !head->deprel) return std::nullopt;
  return std::string_view(*head->deprel);
}

std::optional<std::string_view> opt_view(const std::optional<std::string>& v) {
  if (!v) return std::nullopt;
  return std::string_view(*v);
}

std::optional<std::string_view> token_value(const Sentence& sent, const Token& token,
                                            const FieldPredicate& pred) {
  switch (pred.field()) {
    case SearchField::Form: return std::string_view(token.form);
    case SearchField::Lemma: return opt_view(token.lemma);
    case SearchField::Upos: return opt_view(token.upos);
    case SearchField::Xpos: return opt_view(token.xpos);
    case SearchField::Deprel: return opt_view(token.deprel);
    case SearchField::HeadDeprel: return head_deprel(sent, token);
    case SearchField::Feat: return token.feats.get(pred.feature());
    case SearchField::Text: return std::string_view(sent.text);
  }
  return std::nullopt;
}

bool token_satisfies(const Sentence& sent, const Token& token, const FieldPredicate& pred) {
  const auto value = token_value(sent, token, pred);
  return value && pred.accepts(*value);
}

// ------------------------------------------------------------ query parser

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  SearchQuery parse() {
    SearchQuery query;
    while (true) {
      skip_spaces();
      if (pos_ >= text_.size()) break;
      query.predicates.push_back(term());
    }
    if (query.predicates.empty()) fail(0, "query is empty");
    return query;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& message) const {
    throw QuerySyntaxError(ErrorCode::QuerySyntaxError, at, message);
  }

  void skip_spaces() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool at_term_end() const { return pos_ >= text_.size() || is_space(text_[pos_]); }

  std::string quoted() {
    const auto start = pos_;
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) fail(start, "unterminated quoted value");
    ++pos_;  // closing quote
    if (!at_term_end()) fail(pos_, "expected whitespace after quoted value");
    return out;
  }

  FieldPredicate term() {
    const auto start = pos_;
    if (text_[pos_] == '"') {
      auto value = quoted();
      if (value.empty()) fail(start, "empty quoted word");
      return FieldPredicate::exact(SearchField::Form, std::move(value));
    }
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '=' &&
           text_[pos_] != '~' && text_[pos_] != '?') {
      ++pos_;
    }
    const auto name = text_.substr(start, pos_ - start);
    if (at_term_end()) return FieldPredicate::exact(SearchField::Form, std::string(name));
    if (name.empty()) fail(start, "missing field name");

    SearchField field = SearchField::Form;
    std::string feature;
    if (lower(name.substr(0, 6)) == "feats.") {
      field = SearchField::Feat;
      feature = std::string(name.substr(6));
      if (feature.empty()) fail(start + 6, "missing feature name after 'feats.'");
    } else if (auto known = field_from_name(name)) {
      field = *known;
    } else {
      fail(start, "unknown field '" + std::string(name) + "'");
    }

    const char op = text_[pos_++];
    if (op == '?') {
      if (!at_term_end()) fail(pos_, "expected whitespace after '?'");
      return FieldPredicate::exists(field, std::move(feature));
    }
    if (op == '=') {
      const auto value_start = pos_;
      std::string value;
      if (pos_ < text_.size() && text_[pos_] == '"') {
        value = quoted();
      } else {
        while (!at_term_end()) value += text_[pos_++];
      }
      if (value.empty()) fail(value_start, "empty value for '" + std::string(name) + "'");
      return FieldPredicate::exact(field, std::move(value), std::move(feature));
    }
    // op == '~'
    if (pos_ >= text_.size() || text_[pos_] != '/') fail(pos_, "expected '/' to open a regex");
    const auto pattern_start = pos_;
    ++pos_;
    std::string pattern;
    bool closed = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        pattern += '/';
        pos_ += 2;
        continue;
      }
      if (c == '/') {
        closed = true;
        ++pos_;
        break;
      }
      pattern += c;
      ++pos_;
    }
    if (!closed) fail(pattern_start, "unterminated regex");
    if (pattern.empty()) fail(pattern_start, "empty regex");
    if (!at_term_end()) fail(pos_, "expected whitespace after regex");
    try {
      return FieldPredicate::regex(field, std::move(pattern), std::move(feature));
    } catch (const Error& e) {
      throw QuerySyntaxError(ErrorCode::BadRegex, pattern_start, e.what());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view search_field_name(SearchField field) {
  switch (field) {
    case SearchField::Form: return "FORM";
    case SearchField::Lemma: return "LEMMA";
    case SearchField::Upos: return "UPOS";
    case SearchField::Xpos: return "XPOS";
    case SearchField::Deprel: return "DEPREL";
    case SearchField::HeadDeprel: return "HEAD_DEPREL";
    case SearchField::Text: return "TEXT";
    case SearchField::Feat: return "FEAT";
  }
  return "FORM";
}

// ---------------------------------------------------------- FieldPredicate

FieldPredicate::FieldPredicate(SearchField field, MatchKind kind, std::string value,
                               std::string feature)
    : field_(field), kind_(kind), value_(std::move(value)), feature_(std::move(feature)) {
  if (field_ == SearchField::Feat && feature_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "feature predicates need an attribute name");
  }
  if (field_ != SearchField::Feat) feature_.clear();
}

FieldPredicate FieldPredicate::exact(SearchField field, std::string value, std::string feature) {
  return FieldPredicate(field, MatchKind::Exact, std::move(value), std::move(feature));
}

FieldPredicate FieldPredicate::regex(SearchField field, std::string pattern, std::string feature) {
  FieldPredicate pred(field, MatchKind::Regex, std::move(pattern), std::move(feature));
  try {
    pred.regex_ = std::make_shared<const std::regex>(pred.value_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::BadRegex, "invalid regex '" + pred.value_ + "': " + e.what());
  }
  return pred;
}

FieldPredicate FieldPredicate::exists(SearchField field, std::string feature) {
  return FieldPredicate(field, MatchKind::Exists, {}, std::move(feature));
}

bool FieldPredicate::accepts(std::string_view value) const {
  switch (kind_) {
    case MatchKind::Exact: return value == value_;
    case MatchKind::Regex: return std::regex_search(value.begin(), value.end(), *regex_);
    case MatchKind::Exists: return true;
  }
  return false;
}

std::optional<std::pair<std::size_t, std::size_t>> FieldPredicate::locate(
    std::string_view value) const {
  switch (kind_) {
    case MatchKind::Exact:
      if (value != value_) return std::nullopt;
      return std::pair<std::size_t, std::size_t>{0, value.size()};
    case MatchKind::Regex: {
      std::match_results<std::string_view::const_iterator> found;
      if (!std::regex_search(value.begin(), value.end(), found, *regex_)) return std::nullopt;
      const auto begin = static_cast<std::size_t>(found.position(0));
      return std::pair<std::size_t, std::size_t>{begin,
                                                 begin + static_cast<std::size_t>(found.length(0))};
    }
    case MatchKind::Exists: return std::pair<std::size_t, std::size_t>{0, 0};
  }
  return std::nullopt;
}

std::string FieldPredicate::to_string() const {
  std::string out = field_ == SearchField::Feat ? "feats." + feature_
                                                : lower(search_field_name(field_));
  switch (kind_) {
    case MatchKind::Exact: {
      const bool needs_quotes =
          value_.find_first_of(" \t\"\\") != std::string::npos;
      out += '=';
      if (!needs_quotes) return out + value_;
      out += '"';
      for (char c : value_) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + '"';
    }
    case MatchKind::Regex: {
      out += "~/";
      for (char c : value_) {
        if (c == '/') out += '\\';
        out += c;
      }
      return out + '/';
    }
    case MatchKind::Exists: return out + '?';
  }
  return out;
}

SearchQuery parse_query(std::string_view text) { return QueryParser(text).parse(); }

// ----------------------------------------------------------------- Snippets

std::string sentence_snippet(const Sentence& sent) {
  if (!sent.text.empty()) return sent.text;
  std::string out;
  std::size_t i = 0;
  auto mwt = sent.mwts.begin();
  while (i < sent.tokens.size()) {
    const Token& token = sent.tokens[i];
    std::string_view form = token.form;
    const Misc* misc = &token.misc;
    std::size_t width = 1;
    if (mwt != sent.mwts.end() && mwt->first_id == token.id) {
      form = mwt->form;
      misc = &mwt->misc;
      width = static_cast<std::size_t>(mwt->last_id - mwt->first_id + 1);
      ++mwt;
    }
    out += form;
    i += width;
    if (i < sent.tokens.size() && misc->get("SpaceAfter") != std::optional<std::string_view>("No")) {
      out += ' ';
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> token_offsets(const Sentence& sent,
                                                               std::string_view snippet) {
  std::vector<std::pair<std::size_t, std::size_t>> spans(sent.tokens.size());
  std::size_t cursor = 0;
  std::size_t i = 0;
  auto mwt = sent.mwts.begin();
  while (i < sent.tokens.size()) {
    std::string_view form = sent.tokens[i].form;
    std::size_t width = 1;
    if (mwt != sent.mwts.end() && mwt->first_id == sent.tokens[i].id) {
      form = mwt->form;
      width = static_cast<std::size_t>(mwt->last_id - mwt->first_id + 1);
      ++mwt;
    }
    std::pair<std::size_t, std::size_t> span{cursor, cursor};
    const auto found = snippet.find(form, cursor);
    if (found != std::string_view::npos) {
      span = {found, found + form.size()};
      cursor = span.second;
    }
    for (std::size_t k = 0; k < width; ++k) spans[i + k] = span;
    i += width;
  }
  return spans;
}

// -------------------------------------------------------------- SearchIndex

SearchIndex::SearchIndex(std::vector<IndexedSentence> view) : sentences_(std::move(view)) {
  for (std::uint32_t pos = 0; pos < sentences_.size(); ++pos) {
    position_of_.emplace(sentences_[pos].sentence.sent_id, pos);
    add(pos);
  }
}

template <typename Fn>
void SearchIndex::for_each_key(const Sentence& sent, Fn&& fn) const {
  for (const auto& t : sent.tokens) {
    fn(Key{SearchField::Form, {}, t.form}, t.id);
    if (t.lemma) fn(Key{SearchField::Lemma, {}, *t.lemma}, t.id);
    if (t.upos) fn(Key{SearchField::Upos, {}, *t.upos}, t.id);
    if (t.xpos) fn(Key{SearchField::Xpos, {}, *t.xpos}, t.id);
    if (t.deprel) fn(Key{SearchField::Deprel, {}, *t.deprel}, t.id);
    for (const auto& [name, value] : t.feats.entries()) {
      fn(Key{SearchField::Feat, name, value}, t.id);
    }
  }
}

void SearchIndex::add(std::uint32_t position) {
  for_each_key(sentences_[position].sentence, [&](Key key, int token_id) {
    postings_[std::move(key)].insert(Ref{position, token_id});
  });
}

void SearchIndex::remove(std::uint32_t position) {
  for_each_key(sentences_[position].sentence, [&](const Key& key, int token_id) {
    const auto it = postings_.find(key);
    if (it == postings_.end()) return;
    it->second.erase(Ref{position, token_id});
    if (it->second.empty()) postings_.erase(it);
  });
}

void SearchIndex::update(Sentence sentence, Status status) {
  const auto it = position_of_.find(sentence.sent_id);
  if (it == position_of_.end()) {
    const auto pos = static_cast<std::uint32_t>(sentences_.size());
    position_of_.emplace(sentence.sent_id, pos);
    sentences_.push_back({std::move(sentence), status});
    add(pos);
    return;
  }
  const auto pos = it->second;
  remove(pos);
  sentences_[pos] = {std::move(sentence), status};
  add(pos);
}

SearchIndex::Postings SearchIndex::candidates(const FieldPredicate& pred) const {
  if (pred.kind() == MatchKind::Exact) {
    const auto it = postings_.find(Key{pred.field(), pred.feature(), pred.value()});
    return it == postings_.end() ? Postings{} : it->second;
  }
  Postings out;
  for (auto it = postings_.lower_bound(Key{pred.field(), pred.feature(), {}});
       it != postings_.end(); ++it) {
    const auto& [field, feature, value] = it->first;
    if (field != pred.field() || feature != pred.feature()) break;
    if (pred.accepts(value)) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::size_t SearchIndex::posting_count(SearchField field, std::string_view value,
                                       std::string_view feature) const {
  const auto it = postings_.find(
      Key{field, field == SearchField::Feat ? std::string(feature) : std::string(),
          std::string(value)});
  return it == postings_.end() ? 0 : it->second.size();
}

std::vector<Match> SearchIndex::execute(const SearchQuery& query) const {
  std::vector<const FieldPredicate*> indexed;
  std::vector<const FieldPredicate*> filtered;
  std::vector<const FieldPredicate*> sentence_level;
  for (const auto& pred : query.predicates) {
    if (pred.sentence_scoped()) {
      sentence_level.push_back(&pred);
    } else if (pred.field() == SearchField::HeadDeprel) {
      filtered.push_back(&pred);
    } else {
      indexed.push_back(&pred);
    }
  }

  std::vector<std::optional<bool>> sentence_ok(sentences_.size());
  const auto sentence_passes = [&](std::uint32_t pos) {
    auto& cached = sentence_ok[pos];
    if (!cached) {
      const auto& entry = sentences_[pos];
      bool ok = !query.status_filter || query.status_filter->contains(entry.status);
      for (const auto* pred : sentence_level) {
        if (!ok) break;
        ok = pred->accepts(entry.sentence.text);
      }
      cached = ok;
    }
    return *cached;
  };

  std::vector<Match> matches;
  if (indexed.empty() && filtered.empty()) {
    for (std::uint32_t pos = 0; pos < sentences_.size(); ++pos) {
      if (!sentence_passes(pos)) continue;
      const auto& sent = sentences_[pos].sentence;
      Match m{sent.sent_id, std::nullopt, sentence_snippet(sent), 0, 0};
      if (m.snippet == sent.text) {
        if (const auto span = sentence_level.front()->locate(sent.text)) {
          m.begin = span->first;
          m.end = span->second;
        }
      }
      matches.push_back(std::move(m));
    }
    return matches;
  }

  std::vector<Ref> refs;
  if (!indexed.empty()) {
    std::vector<Postings> sets;
    sets.reserve(indexed.size());
    for (const auto* pred : indexed) sets.push_back(candidates(*pred));
    std::sort(sets.begin(), sets.end(),
              [](const Postings& a, const Postings& b) { return a.size() < b.size(); });
    for (const auto& ref : sets.front()) {
      bool everywhere = true;
      for (std::size_t k = 1; k < sets.size() && everywhere; ++k) everywhere = sets[k].contains(ref);
      if (everywhere) refs.push_back(ref);
    }
  } else {
    for (std::uint32_t pos = 0; pos < sentences_.size(); ++pos) {
      for (const auto& t : sentences_[pos].sentence.tokens) refs.push_back(Ref{pos, t.id});
    }
  }

  std::uint32_t offsets_for = UINT32_MAX;
  std::string snippet;
  std::vector<std::pair<std::size_t, std::size_t>> offsets;
  for (const auto& ref : refs) {
    if (!sentence_passes(ref.position)) continue;
    const auto& sent = sentences_[ref.position].sentence;
    const Token& token = sent.tokens[static_cast<std::size_t>(ref.token_id - 1)];
    const bool ok = std::all_of(filtered.begin(), filtered.end(), [&](const FieldPredicate* p) {
      return token_satisfies(sent, token, *p);
    });
    if (!ok) continue;
    if (offsets_for != ref.position) {
      snippet = sentence_snippet(sent);
      offsets = token_offsets(sent, snippet);
      offsets_for = ref.position;
    }
    const auto [begin, end] = offsets[static_cast<std::size_t>(ref.token_id - 1)];
    matches.push_back(Match{sent.sent_id, ref.token_id, snippet, begin, end});
  }
  return matches;
}

SearchIndex build_index(std::vector<IndexedSentence> view) { return SearchIndex(std::move(view)); }

SearchIndex update_index(SearchIndex index, Sentence sentence, Status status) {
  index.update(std::move(sentence), status);
  return index;
}

}  // namespace boat
