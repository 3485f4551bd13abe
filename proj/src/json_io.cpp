#include "boat/json_io.hpp"

namespace boat {
namespace {

json nullable(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  auto value = it->get<std::string>();
  if (value.empty() || value == "_") return std::nullopt;
  return value;
}

std::string column_or_empty(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "_";
  return it->get<std::string>();
}

// FEATS in the order the annotator typed them, so order warnings survive.
std::string feats_in_source_order(const FeatureBag& bag) {
  std::string out;
  for (const auto& [name, value] : bag.entries()) {
    if (!out.empty()) out += '|';
    out += name + "=" + value;
  }
  return out;
}

// Matches "# key = ..." the way the CoNLL-U reader does.
bool comment_has_key(std::string_view line, std::string_view key) {
  if (line.empty() || line.front() != '#') return false;
  line.remove_prefix(1);
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  if (line.substr(0, key.size()) != key) return false;
  line.remove_prefix(key.size());
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  return !line.empty() && line.front() == '=';
}

std::string timestamp_or_null(const std::optional<Timestamp>& ts) {
  return ts ? format_timestamp(*ts) : std::string();
}

}  // namespace

void to_json(json& j, const Token& t) {
  j = json{{"id", t.id},
           {"form", t.form},
           {"lemma", nullable(t.lemma)},
           {"upos", nullable(t.upos)},
           {"xpos", nullable(t.xpos)},
           {"feats", t.feats.empty() ? json(nullptr) : json(feats_in_source_order(t.feats))},
           {"head", t.head ? json(*t.head) : json(nullptr)},
           {"deprel", nullable(t.deprel)},
           {"deps", t.deps.empty() ? json(nullptr) : json(serialize_deps(t.deps))},
           {"misc", t.misc.empty() ? json(nullptr) : json(serialize_misc(t.misc))}};
}

void from_json(const json& j, Token& t) {
  t.id = j.at("id").get<int>();
  t.form = j.at("form").get<std::string>();
  t.lemma = optional_string(j, "lemma");
  t.upos = optional_string(j, "upos");
  t.xpos = optional_string(j, "xpos");
  t.feats = parse_feats(column_or_empty(j, "feats"));
  const auto head = j.find("head");
  t.head = head == j.end() || head->is_null() ? std::nullopt : std::optional<int>(head->get<int>());
  t.deprel = optional_string(j, "deprel");
  t.deps = parse_deps(column_or_empty(j, "deps"));
  t.misc = parse_misc(column_or_empty(j, "misc"));
}

void to_json(json& j, const MultiwordToken& m) {
  j = json{{"first_id", m.first_id},
           {"last_id", m.last_id},
           {"form", m.form},
           {"misc", m.misc.empty() ? json(nullptr) : json(serialize_misc(m.misc))}};
}

void from_json(const json& j, MultiwordToken& m) {
  m.first_id = j.at("first_id").get<int>();
  m.last_id = j.at("last_id").get<int>();
  m.form = j.at("form").get<std::string>();
  m.misc = parse_misc(column_or_empty(j, "misc"));
}

void to_json(json& j, const Sentence& s) {
  j = json{{"sent_id", s.sent_id},
           {"text", s.text},
           {"comments", s.comments},
           {"tokens", s.tokens},
           {"mwts", s.mwts}};
}

void from_json(const json& j, Sentence& s) {
  s.sent_id = j.at("sent_id").get<std::string>();
  s.text = j.value("text", std::string());
  s.comments = j.value("comments", std::vector<std::string>{});
  s.tokens = j.at("tokens").get<std::vector<Token>>();
  s.mwts = j.value("mwts", std::vector<MultiwordToken>{});

  bool has_text = false;
  for (auto& comment : s.comments) {
    if (comment_has_key(comment, "sent_id")) comment = "# sent_id = " + s.sent_id;
    if (comment_has_key(comment, "text")) {
      comment = "# text = " + s.text;
      has_text = true;
    }
  }
  if (!has_text && !s.text.empty()) s.comments.push_back("# text = " + s.text);
}

void to_json(json& j, const ValidationIssue& issue) {
  j = json{{"code", issue.code},
           {"severity", severity_name(issue.severity)},
           {"token_id", issue.token_id ? json(*issue.token_id) : json(nullptr)},
           {"message", issue.message}};
}

void to_json(json& j, const Match& m) {
  j = json{{"sent_id", m.sent_id},
           {"token_id", m.token_id ? json(*m.token_id) : json(nullptr)},
           {"snippet", m.snippet},
           {"begin", m.begin},
           {"end", m.end}};
}

void to_json(json& j, const Point& p) { j = json::array({p.x, p.y}); }

void to_json(json& j, const ArcDiagram& d) {
  json nodes = json::array();
  for (const auto& n : d.nodes) {
    nodes.push_back({{"token_id", n.token_id},
                     {"x", n.x},
                     {"y", n.y},
                     {"width", n.width},
                     {"label", n.label},
                     {"sublabel", n.sublabel}});
  }
  json edges = json::array();
  for (const auto& e : d.edges) {
    edges.push_back({{"head_id", e.head_id},
                     {"dep_id", e.dep_id},
                     {"deprel", e.deprel},
                     {"height", e.height},
                     {"anchors", e.anchors}});
  }
  j = json{{"mode", layout_mode_name(d.mode)},
           {"width", d.width},
           {"height", d.height},
           {"nodes", std::move(nodes)},
           {"edges", std::move(edges)}};
}

void to_json(json& j, const AgreementReport& r) {
  json fields = json::object();
  for (const auto& [field, stats] : r.per_field) {
    fields[std::string(agreement_field_name(field))] = {
        {"raw_agreement", stats.raw_agreement},
        {"kappa", stats.kappa ? json(*stats.kappa) : json(nullptr)}};
  }
  j = json{{"annotator_a", r.annotator_a},
           {"annotator_b", r.annotator_b},
           {"n_sentences_compared", r.n_sentences_compared},
           {"n_sentences_skipped_tokenization", r.n_sentences_skipped_tokenization},
           {"n_tokens", r.n_tokens},
           {"n_attached_tokens", r.n_attached_tokens},
           {"per_field", std::move(fields)},
           {"uas", r.uas ? json(*r.uas) : json(nullptr)},
           {"las", r.las ? json(*r.las) : json(nullptr)}};
}

void to_json(json& j, const Treebank& t) {
  j = json{{"id", t.id},
           {"name", t.name},
           {"language", t.language},
           {"created_at", format_timestamp(t.created_at)},
           {"sentence_count", t.sentence_count}};
}

void to_json(json& j, const Annotator& a) {
  j = json{{"id", a.id},
           {"display_name", a.display_name},
           {"created_at", format_timestamp(a.created_at)}};
}

void to_json(json& j, const SentenceSummary& s) {
  const auto updated = timestamp_or_null(s.updated_at);
  j = json{{"sent_id", s.sent_id},
           {"text", s.text},
           {"status", status_name(s.status)},
           {"revision", s.revision},
           {"updated_at", updated.empty() ? json(nullptr) : json(updated)}};
}

void to_json(json& j, const SentencePage& p) {
  j = json{{"items", p.items}, {"total", p.total}, {"page", p.page}, {"page_size", p.page_size}};
}

void to_json(json& j, const AnnotationRecord& r) {
  const auto updated = timestamp_or_null(r.updated_at);
  j = json{{"treebank_id", r.treebank_id},
           {"sent_id", r.sent_id},
           {"annotator_id", r.annotator_id},
           {"status", status_name(r.status)},
           {"note", r.note},
           {"revision", r.revision},
           {"updated_at", updated.empty() ? json(nullptr) : json(updated)},
           {"sentence", r.sentence},
           {"conllu", serialize_sentence(r.sentence)},
           {"issues", validate_sentence(r.sentence)}};
}

json error_envelope(const Error& error) {
  json details = json::object();
  if (const auto* parse = dynamic_cast<const ParseError*>(&error)) {
    details["line"] = parse->line();
  } else if (const auto* query = dynamic_cast<const QuerySyntaxError*>(&error)) {
    details["position"] = query->position();
  } else if (const auto* conflict = dynamic_cast<const RevisionConflict*>(&error)) {
    details["expected_revision"] = conflict->expected_revision();
    details["current_revision"] = conflict->current_revision();
  } else if (const auto* blocked = dynamic_cast<const CompleteWithErrors*>(&error)) {
    details["issues"] = blocked->issues();
  }
  return json{{"code", error_code_name(error.code())},
              {"message", error.what()},
              {"details", std::move(details)}};
}

}  // namespace boat
