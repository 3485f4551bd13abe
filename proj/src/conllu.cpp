#include "boat/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "boat/errors.hpp"

namespace boat {
namespace {

constexpr std::string_view kEmpty = "_";
constexpr std::size_t kColumns = 10;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<int> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::string> optional_field(std::string_view column) {
  if (column == kEmpty) return std::nullopt;
  return std::string(column);
}

std::string_view or_empty(const std::optional<std::string>& value) {
  return value ? std::string_view(*value) : kEmpty;
}

bool has_control(std::string_view text) {
  return text.find_first_of("\t\n\r") != std::string_view::npos;
}

bool starts_with(std::string_view text, std::string_view prefix) {
  return text.substr(0, prefix.size()) == prefix;
}

std::vector<EnhancedDep> deps_at(std::string_view text, std::size_t line) {
  std::vector<EnhancedDep> deps;
  if (text == kEmpty) return deps;
  for (auto item : split(text, '|')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos || colon + 1 == item.size()) {
      throw ParseError(ErrorCode::MalformedLine, line,
                       "DEPS item '" + std::string(item) + "' is not head:relation");
    }
    const auto head = parse_int(item.substr(0, colon));
    if (!head) {
      throw ParseError(ErrorCode::MalformedLine, line,
                       "DEPS head '" + std::string(item.substr(0, colon)) +
                           "' is not an integer (empty nodes are not supported)");
    }
    deps.push_back({*head, std::string(item.substr(colon + 1))});
  }
  return deps;
}

std::string deps_column(const std::vector<EnhancedDep>& deps) {
  if (deps.empty()) return std::string(kEmpty);
  std::string out;
  for (const auto& dep : deps) {
    if (!out.empty()) out += '|';
    out += std::to_string(dep.head);
    out += ':';
    out += dep.relation;
  }
  return out;
}

std::string comment_value(std::string_view line, std::string_view key) {
  // "# key = value"
  auto rest = line.substr(1);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!starts_with(rest, key)) return {};
  rest.remove_prefix(key.size());
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (rest.empty() || rest.front() != '=') return {};
  rest.remove_prefix(1);
  if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  return std::string(rest);
}

bool is_comment_key(std::string_view line, std::string_view key) {
  auto rest = line.substr(1);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!starts_with(rest, key)) return false;
  rest.remove_prefix(key.size());
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  return !rest.empty() && rest.front() == '=';
}

int shift_id(int ref, int pivot, int delta) { return ref > pivot ? ref + delta : ref; }

}  // namespace

std::vector<EnhancedDep> parse_deps(std::string_view text) { return deps_at(text, 1); }

std::string serialize_deps(const std::vector<EnhancedDep>& deps) { return deps_column(deps); }

// ---------------------------------------------------------------- FeatureBag

bool feature_name_less(std::string_view a, std::string_view b) {
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ca = std::tolower(static_cast<unsigned char>(a[i]));
    const auto cb = std::tolower(static_cast<unsigned char>(b[i]));
    if (ca != cb) return ca < cb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

FeatureBag FeatureBag::from_entries(std::vector<Entry> entries) {
  FeatureBag bag;
  for (auto& [name, value] : entries) {
    if (name.empty()) throw Error(ErrorCode::MalformedFeature, "feature with empty name");
    if (bag.contains(name)) {
      throw Error(ErrorCode::MalformedFeature, "duplicate feature '" + name + "'");
    }
    bag.entries_.emplace_back(std::move(name), std::move(value));
  }
  return bag;
}

std::optional<std::string_view> FeatureBag::get(std::string_view name) const {
  for (const auto& [key, value] : entries_) {
    if (key == name) return std::string_view(value);
  }
  return std::nullopt;
}

void FeatureBag::set(std::string name, std::string value) {
  for (auto& entry : entries_) {
    if (entry.first == name) {
      entry.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(name), std::move(value));
}

bool FeatureBag::erase(std::string_view name) {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Entry& e) { return e.first == name; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

std::vector<FeatureBag::Entry> FeatureBag::canonical_entries() const {
  auto sorted = entries_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Entry& a, const Entry& b) { return feature_name_less(a.first, b.first); });
  return sorted;
}

bool FeatureBag::is_canonical() const {
  return std::is_sorted(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return feature_name_less(a.first, b.first);
  });
}

bool operator==(const FeatureBag& a, const FeatureBag& b) {
  return a.canonical_entries() == b.canonical_entries();
}

FeatureBag parse_feats(std::string_view text) {
  if (text.empty() || text == kEmpty) return {};
  std::vector<FeatureBag::Entry> entries;
  for (auto item : split(text, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedFeature,
                  "feature '" + std::string(item) + "' has no '='");
    }
    entries.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return FeatureBag::from_entries(std::move(entries));
}

std::string serialize_feats(const FeatureBag& bag) {
  if (bag.empty()) return std::string(kEmpty);
  std::string out;
  for (const auto& [name, value] : bag.canonical_entries()) {
    if (!out.empty()) out += '|';
    out += name;
    out += '=';
    out += value;
  }
  return out;
}

// ---------------------------------------------------------------------- Misc

std::optional<std::string_view> Misc::get(std::string_view key) const {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq != std::string::npos && std::string_view(item).substr(0, eq) == key) {
      return std::string_view(item).substr(eq + 1);
    }
  }
  return std::nullopt;
}

Misc parse_misc(std::string_view text) {
  Misc misc;
  if (text.empty() || text == kEmpty) return misc;
  for (auto item : split(text, '|')) misc.items.emplace_back(item);
  return misc;
}

std::string serialize_misc(const Misc& misc) {
  if (misc.items.empty()) return std::string(kEmpty);
  std::string out;
  for (const auto& item : misc.items) {
    if (!out.empty()) out += '|';
    out += item;
  }
  return out;
}

// ------------------------------------------------------------------ Sentence

const Token* Sentence::find(int id) const noexcept {
  if (id < 1 || static_cast<std::size_t>(id) > tokens.size()) return nullptr;
  const auto& token = tokens[static_cast<std::size_t>(id - 1)];
  return token.id == id ? &token : nullptr;
}

const MultiwordToken* Sentence::mwt_covering(int id) const noexcept {
  for (const auto& mwt : mwts) {
    if (mwt.covers(id)) return &mwt;
  }
  return nullptr;
}

// ------------------------------------------------------------------- Parsing

std::vector<std::pair<std::string, std::size_t>> split_blocks(std::string_view text) {
  std::vector<std::pair<std::string, std::size_t>> blocks;
  if (starts_with(text, "\xEF\xBB\xBF")) text.remove_prefix(3);
  std::string current;
  std::size_t current_start = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (!current.empty()) {
        current += '\n';
        blocks.emplace_back(std::move(current), current_start);
        current.clear();
      }
      continue;
    }
    if (current.empty()) current_start = line_no;
    current += line;
    current += '\n';
  }
  if (!current.empty()) {
    current += '\n';
    blocks.emplace_back(std::move(current), current_start);
  }
  return blocks;
}

Sentence parse_sentence(std::string_view block, std::size_t first_line, std::string fallback_id) {
  Sentence sent;
  bool have_sent_id = false;
  bool seen_rows = false;
  std::size_t line_no = first_line - 1;
  std::size_t pos = 0;
  while (pos < block.size()) {
    auto end = block.find('\n', pos);
    if (end == std::string_view::npos) end = block.size();
    auto line = block.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (seen_rows) {
        throw ParseError(ErrorCode::MalformedLine, line_no,
                         "comment line after token lines");
      }
      if (is_comment_key(line, "sent_id")) {
        sent.sent_id = comment_value(line, "sent_id");
        have_sent_id = true;
      } else if (is_comment_key(line, "text")) {
        sent.text = comment_value(line, "text");
      }
      sent.comments.emplace_back(line);
      continue;
    }

    seen_rows = true;
    const auto cols = split(line, '\t');
    if (cols.size() != kColumns) {
      throw ParseError(ErrorCode::MalformedLine, line_no,
                       "expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()));
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].empty()) {
        throw ParseError(ErrorCode::MalformedLine, line_no,
                         "column " + std::to_string(c + 1) + " is empty");
      }
    }
    const auto id_text = cols[0];
    if (id_text.find('.') != std::string_view::npos) {
      throw ParseError(ErrorCode::MalformedLine, line_no,
                       "empty node '" + std::string(id_text) + "' is not supported");
    }
    const int expected = static_cast<int>(sent.tokens.size()) + 1;

    if (const auto dash = id_text.find('-'); dash != std::string_view::npos) {
      const auto first = parse_int(id_text.substr(0, dash));
      const auto last = parse_int(id_text.substr(dash + 1));
      if (!first || !last || *first < 1 || *first >= *last) {
        throw ParseError(ErrorCode::MalformedLine, line_no,
                         "invalid multiword range '" + std::string(id_text) + "'");
      }
      for (std::size_t c = 2; c < 9; ++c) {
        if (cols[c] != kEmpty) {
          throw ParseError(ErrorCode::MalformedLine, line_no,
                           "multiword token rows may only fill FORM and MISC");
        }
      }
      if (*first != expected) {
        throw ParseError(ErrorCode::NonContiguousIds, line_no,
                         "multiword range " + std::string(id_text) +
                             " must precede token " + std::to_string(*first) +
                             ", next token is " + std::to_string(expected));
      }
      if (!sent.mwts.empty() && sent.mwts.back().last_id >= *first) {
        throw ParseError(ErrorCode::MalformedLine, line_no,
                         "multiword range " + std::string(id_text) + " overlaps the previous one");
      }
      sent.mwts.push_back({*first, *last, std::string(cols[1]), parse_misc(cols[9])});
      continue;
    }

    const auto id = parse_int(id_text);
    if (!id || *id < 1) {
      throw ParseError(ErrorCode::MalformedLine, line_no,
                       "token id '" + std::string(id_text) + "' is not a positive integer");
    }
    if (*id != expected) {
      throw ParseError(ErrorCode::NonContiguousIds, line_no,
                       "token id " + std::to_string(*id) + " where " + std::to_string(expected) +
                           " was expected");
    }
    Token token;
    token.id = *id;
    token.form = std::string(cols[1]);
    token.lemma = optional_field(cols[2]);
    token.upos = optional_field(cols[3]);
    token.xpos = optional_field(cols[4]);
    try {
      token.feats = parse_feats(cols[5]);
    } catch (const Error& e) {
      throw ParseError(ErrorCode::MalformedFeature, line_no, e.what());
    }
    if (cols[6] != kEmpty) {
      const auto head = parse_int(cols[6]);
      if (!head) {
        throw ParseError(ErrorCode::MalformedLine, line_no,
                         "HEAD '" + std::string(cols[6]) + "' is not a non-negative integer");
      }
      token.head = *head;
    }
    token.deprel = optional_field(cols[7]);
    token.deps = deps_at(cols[8], line_no);
    token.misc = parse_misc(cols[9]);
    sent.tokens.push_back(std::move(token));
  }

  if (sent.tokens.empty()) {
    throw ParseError(ErrorCode::MalformedLine, first_line, "sentence has no token lines");
  }
  for (const auto& mwt : sent.mwts) {
    if (static_cast<std::size_t>(mwt.last_id) > sent.tokens.size()) {
      throw ParseError(ErrorCode::NonContiguousIds, line_no,
                       "multiword range " + std::to_string(mwt.first_id) + "-" +
                           std::to_string(mwt.last_id) + " extends past the last token");
    }
  }
  if (!have_sent_id) sent.sent_id = std::move(fallback_id);
  return sent;
}

Document parse_document(std::string_view text) {
  Document doc;
  std::vector<std::size_t> first_lines;
  for (const auto& [block, line] : split_blocks(text)) {
    doc.sentences.push_back(
        parse_sentence(block, line, std::to_string(doc.sentences.size() + 1)));
    first_lines.push_back(line);
  }
  std::vector<std::size_t> order(doc.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return doc.sentences[a].sent_id < doc.sentences[b].sent_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = doc.sentences[order[i - 1]];
    const auto& cur = doc.sentences[order[i]];
    if (prev.sent_id == cur.sent_id) {
      throw ParseError(ErrorCode::DuplicateSentId, first_lines[order[i]],
                       "sent_id '" + cur.sent_id + "' already used at line " +
                           std::to_string(first_lines[order[i - 1]]));
    }
  }
  return doc;
}

// ------------------------------------------------------------- Serializing

std::string serialize_token(const Token& t) {
  std::string out;
  out.reserve(64);
  out += std::to_string(t.id);
  out += '\t';
  out += t.form;
  out += '\t';
  out += or_empty(t.lemma);
  out += '\t';
  out += or_empty(t.upos);
  out += '\t';
  out += or_empty(t.xpos);
  out += '\t';
  out += serialize_feats(t.feats);
  out += '\t';
  out += t.head ? std::to_string(*t.head) : std::string(kEmpty);
  out += '\t';
  out += or_empty(t.deprel);
  out += '\t';
  out += deps_column(t.deps);
  out += '\t';
  out += serialize_misc(t.misc);
  return out;
}

std::string serialize_sentence(const Sentence& sent) {
  std::string out;
  for (const auto& comment : sent.comments) {
    out += comment;
    out += '\n';
  }
  auto mwt = sent.mwts.begin();
  for (const auto& token : sent.tokens) {
    if (mwt != sent.mwts.end() && mwt->first_id == token.id) {
      out += std::to_string(mwt->first_id);
      out += '-';
      out += std::to_string(mwt->last_id);
      out += '\t';
      out += mwt->form;
      out += "\t_\t_\t_\t_\t_\t_\t_\t";
      out += serialize_misc(mwt->misc);
      out += '\n';
      ++mwt;
    }
    out += serialize_token(token);
    out += '\n';
  }
  out += '\n';
  return out;
}

std::string serialize_document(const Document& doc) {
  std::string out;
  for (const auto& sent : doc.sentences) out += serialize_sentence(sent);
  return out;
}

// ---------------------------------------------------------------- Structure

std::optional<std::string> find_sentence_defect(const Sentence& sent) {
  if (sent.sent_id.empty() || has_control(sent.sent_id)) return "sent_id is empty or malformed";
  if (sent.tokens.empty()) return "sentence has no tokens";
  for (const auto& comment : sent.comments) {
    if (comment.empty() || comment.front() != '#' || comment.find('\n') != std::string::npos) {
      return "comment lines must start with '#' and span one line";
    }
  }
  const auto field_ok = [](const std::optional<std::string>& v) {
    return !v || (!v->empty() && !has_control(*v));
  };
  const auto misc_ok = [](const Misc& misc) {
    return std::all_of(misc.items.begin(), misc.items.end(), [](const std::string& item) {
      return !item.empty() && item.find('|') == std::string::npos && !has_control(item);
    });
  };
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    const auto& t = sent.tokens[i];
    const auto where = "token " + std::to_string(i + 1) + ": ";
    if (t.id != static_cast<int>(i) + 1) {
      return where + "id " + std::to_string(t.id) + " breaks the 1..n sequence";
    }
    if (t.form.empty() || has_control(t.form)) return where + "FORM is empty or malformed";
    if (!field_ok(t.lemma) || !field_ok(t.upos) || !field_ok(t.xpos) || !field_ok(t.deprel)) {
      return where + "a tag column is empty or contains control characters";
    }
    if (t.head && *t.head < 0) return where + "HEAD is negative";
    for (const auto& [name, value] : t.feats.entries()) {
      if (name.empty() || has_control(name) || has_control(value) ||
          name.find_first_of("|=") != std::string::npos ||
          value.find('|') != std::string::npos) {
        return where + "malformed feature '" + name + "=" + value + "'";
      }
    }
    for (const auto& dep : t.deps) {
      if (dep.head < 0 || dep.relation.empty() || has_control(dep.relation) ||
          dep.relation.find('|') != std::string::npos) {
        return where + "malformed DEPS entry";
      }
    }
    if (!misc_ok(t.misc)) return where + "malformed MISC item";
  }
  const auto n = static_cast<int>(sent.tokens.size());
  int previous_last = 0;
  for (const auto& mwt : sent.mwts) {
    const auto range = std::to_string(mwt.first_id) + "-" + std::to_string(mwt.last_id);
    if (mwt.first_id < 1 || mwt.first_id >= mwt.last_id || mwt.last_id > n) {
      return "multiword range " + range + " is invalid";
    }
    if (mwt.first_id <= previous_last) {
      return "multiword range " + range + " overlaps or is out of order";
    }
    if (mwt.form.empty() || has_control(mwt.form)) {
      return "multiword range " + range + " has an empty or malformed FORM";
    }
    if (!misc_ok(mwt.misc)) return "multiword range " + range + " has a malformed MISC item";
    previous_last = mwt.last_id;
  }
  return std::nullopt;
}

void check_sentence(const Sentence& sent) {
  if (auto defect = find_sentence_defect(sent)) {
    throw Error(ErrorCode::InvalidSentence, "sentence '" + sent.sent_id + "': " + *defect);
  }
}

std::vector<std::string> surface_forms(const Sentence& sent) {
  std::vector<std::string> forms;
  std::size_t i = 0;
  auto mwt = sent.mwts.begin();
  while (i < sent.tokens.size()) {
    const int id = sent.tokens[i].id;
    if (mwt != sent.mwts.end() && mwt->first_id == id) {
      forms.push_back(mwt->form);
      i += static_cast<std::size_t>(mwt->last_id - mwt->first_id + 1);
      ++mwt;
      continue;
    }
    forms.push_back(sent.tokens[i].form);
    ++i;
  }
  return forms;
}

// ----------------------------------------------------------------- Split/join

Sentence split_token(const Sentence& sent, int id, std::span<const std::string> parts) {
  const Token* target = sent.find(id);
  if (target == nullptr) {
    throw Error(ErrorCode::TokenNotFound,
                "no token " + std::to_string(id) + " in sentence '" + sent.sent_id + "'");
  }
  if (sent.mwt_covering(id) != nullptr) {
    throw Error(ErrorCode::AlreadySplit,
                "token " + std::to_string(id) + " is already part of a multiword token");
  }
  if (parts.size() < 2) {
    throw Error(ErrorCode::TooFewParts, "a split needs at least two parts");
  }
  for (const auto& part : parts) {
    if (part.empty() || has_control(part)) {
      throw Error(ErrorCode::InvalidArgument, "split parts must be non-empty single-line strings");
    }
  }

  const int delta = static_cast<int>(parts.size()) - 1;
  const auto remap = [&](int ref) { return shift_id(ref, id, delta); };

  Sentence out;
  out.sent_id = sent.sent_id;
  out.text = sent.text;
  out.comments = sent.comments;
  out.tokens.reserve(sent.tokens.size() + parts.size() - 1);
  for (const auto& token : sent.tokens) {
    if (token.id == id) {
      Token first = token;
      first.form = parts[0];
      out.tokens.push_back(std::move(first));
      for (std::size_t j = 1; j < parts.size(); ++j) {
        Token extra;
        extra.form = parts[j];
        out.tokens.push_back(std::move(extra));
      }
    } else {
      out.tokens.push_back(token);
    }
  }
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    auto& token = out.tokens[i];
    token.id = static_cast<int>(i) + 1;
    if (token.head) token.head = remap(*token.head);
    for (auto& dep : token.deps) dep.head = remap(dep.head);
  }

  bool inserted = false;
  for (const auto& mwt : sent.mwts) {
    if (!inserted && mwt.first_id > id) {
      out.mwts.push_back({id, id + delta, target->form, {}});
      inserted = true;
    }
    out.mwts.push_back({remap(mwt.first_id), remap(mwt.last_id), mwt.form, mwt.misc});
  }
  if (!inserted) out.mwts.push_back({id, id + delta, target->form, {}});
  return out;
}

Sentence join_tokens(const Sentence& sent, int first_id, int last_id,
                     std::optional<std::string> joined_form) {
  const int n = static_cast<int>(sent.tokens.size());
  if (first_id < 1 || last_id > n || first_id >= last_id) {
    throw Error(ErrorCode::InvalidRange, "cannot join tokens " + std::to_string(first_id) +
                                             ".." + std::to_string(last_id) + " of a " +
                                             std::to_string(n) + "-token sentence");
  }
  const MultiwordToken* exact = nullptr;
  for (const auto& mwt : sent.mwts) {
    const bool intersects = mwt.first_id <= last_id && mwt.last_id >= first_id;
    if (!intersects) continue;
    if (mwt.first_id == first_id && mwt.last_id == last_id) {
      exact = &mwt;
    } else {
      throw Error(ErrorCode::InvalidRange,
                  "range " + std::to_string(first_id) + ".." + std::to_string(last_id) +
                      " partially overlaps multiword token " + std::to_string(mwt.first_id) +
                      "-" + std::to_string(mwt.last_id));
    }
  }
  if (joined_form && (joined_form->empty() || has_control(*joined_form))) {
    throw Error(ErrorCode::InvalidArgument, "joined form must be a non-empty single-line string");
  }

  const auto inside_tail = [&](int ref) { return ref > first_id && ref <= last_id; };
  const auto inside = [&](int ref) { return ref >= first_id && ref <= last_id; };
  for (const auto& token : sent.tokens) {
    if (inside(token.id)) continue;
    const bool head_dangles = token.head && inside_tail(*token.head);
    const bool deps_dangle = std::any_of(token.deps.begin(), token.deps.end(),
                                         [&](const EnhancedDep& d) { return inside_tail(d.head); });
    if (head_dangles || deps_dangle) {
      throw Error(ErrorCode::DanglingHeads,
                  "token " + std::to_string(token.id) + " depends on a token that the join removes");
    }
  }
  const Token& first = sent.tokens[static_cast<std::size_t>(first_id - 1)];
  if ((first.head && inside(*first.head)) ||
      std::any_of(first.deps.begin(), first.deps.end(),
                  [&](const EnhancedDep& d) { return inside(d.head); })) {
    throw Error(ErrorCode::DanglingHeads,
                "token " + std::to_string(first_id) + " is attached inside the joined range");
  }

  std::string form;
  if (joined_form) {
    form = *joined_form;
  } else if (exact != nullptr) {
    form = exact->form;
  } else {
    for (int i = first_id; i <= last_id; ++i) form += sent.tokens[static_cast<std::size_t>(i - 1)].form;
  }

  const int delta = -(last_id - first_id);
  const auto remap = [&](int ref) { return shift_id(ref, last_id, delta); };

  Sentence out;
  out.sent_id = sent.sent_id;
  out.text = sent.text;
  out.comments = sent.comments;
  for (const auto& token : sent.tokens) {
    if (token.id > first_id && token.id <= last_id) continue;
    Token copy = token;
    if (copy.id == first_id) copy.form = form;
    copy.id = remap(copy.id);
    if (copy.head) copy.head = remap(*copy.head);
    for (auto& dep : copy.deps) dep.head = remap(dep.head);
    out.tokens.push_back(std::move(copy));
  }
  for (const auto& mwt : sent.mwts) {
    if (&mwt == exact) continue;
    out.mwts.push_back({remap(mwt.first_id), remap(mwt.last_id), mwt.form, mwt.misc});
  }
  return out;
}

}  // namespace boat
