#include "boat/validation.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace boat {
namespace {

constexpr std::array<std::string_view, 17> kUpos = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

constexpr std::array<std::string_view, 37> kDeprels = {
    "acl",       "advcl",     "advmod", "amod",       "appos",    "aux",      "case",
    "cc",        "ccomp",     "clf",    "compound",   "conj",     "cop",      "csubj",
    "dep",       "det",       "discourse", "dislocated", "expl",  "fixed",    "flat",
    "goeswith",  "iobj",      "list",   "mark",       "nmod",     "nsubj",    "nummod",
    "obj",       "obl",       "orphan", "parataxis",  "punct",    "reparandum", "root",
    "vocative",  "xcomp"};

constexpr std::array<std::string_view, 40> kSubtypes = {
    "acl:relcl",     "advcl:relcl",   "advmod:emph",  "advmod:lmod",  "advmod:tmod",
    "aux:pass",      "aux:q",         "cc:preconj",   "ccomp:obj",    "compound:lvc",
    "compound:prt",  "compound:redup", "compound:svc", "csubj:outer", "csubj:pass",
    "det:numgov",    "det:nummod",    "det:poss",     "det:predet",   "discourse:q",
    "expl:impers",   "expl:pass",     "expl:pv",      "flat:foreign", "flat:name",
    "iobj:agent",    "nmod:arg",      "nmod:npmod",   "nmod:poss",    "nmod:tmod",
    "nsubj:outer",   "nsubj:pass",    "nummod:gov",   "obj:agent",    "obl:agent",
    "obl:arg",       "obl:lmod",      "obl:npmod",    "obl:tmod",     "parataxis:discourse"};

bool contains_sorted(std::span<const std::string_view> set, std::string_view value) {
  return std::binary_search(set.begin(), set.end(), value);
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_upper(c) || is_lower(c) || is_digit(c); }

// [A-Z][A-Za-z0-9]*(\[[a-z]+\])?
bool valid_feature_name(std::string_view name) {
  if (name.empty() || !is_upper(name.front())) return false;
  std::size_t i = 1;
  while (i < name.size() && is_alnum(name[i])) ++i;
  if (i == name.size()) return true;
  if (name[i] != '[' || name.back() != ']' || i + 2 >= name.size()) return false;
  for (std::size_t j = i + 1; j + 1 < name.size(); ++j) {
    if (!is_lower(name[j])) return false;
  }
  return true;
}

// [A-Z0-9][A-Za-z0-9]*, per comma-separated value
bool valid_feature_value(std::string_view value) {
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    const auto item = value.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start);
    if (item.empty() || !(is_upper(item.front()) || is_digit(item.front()))) return false;
    if (!std::all_of(item.begin(), item.end(), is_alnum)) return false;
    if (comma == std::string_view::npos) return true;
    start = comma + 1;
  }
}

ValidationIssue issue(std::string_view code, Severity severity, std::optional<int> token,
                      std::string message) {
  return {std::string(code), severity, token, std::move(message)};
}

std::string id_str(int id) { return std::to_string(id); }

// Tokens lying on a cycle of set, in-range heads; one entry per cycle,
// represented by its smallest member and listing all members.
std::vector<std::vector<int>> find_cycles(const Sentence& sent) {
  const int n = static_cast<int>(sent.size());
  enum class Mark { Unvisited, OnPath, Done };
  std::vector<Mark> mark(static_cast<std::size_t>(n) + 1, Mark::Unvisited);
  std::vector<std::vector<int>> cycles;
  const auto next = [&](int id) -> int {
    const auto& head = sent.tokens[static_cast<std::size_t>(id - 1)].head;
    if (!head || *head < 1 || *head > n) return 0;
    return *head;
  };
  for (int start = 1; start <= n; ++start) {
    if (mark[static_cast<std::size_t>(start)] != Mark::Unvisited) continue;
    std::vector<int> path;
    int cur = start;
    while (cur != 0 && mark[static_cast<std::size_t>(cur)] == Mark::Unvisited) {
      mark[static_cast<std::size_t>(cur)] = Mark::OnPath;
      path.push_back(cur);
      cur = next(cur);
    }
    if (cur != 0 && mark[static_cast<std::size_t>(cur)] == Mark::OnPath) {
      const auto from = std::find(path.begin(), path.end(), cur);
      std::vector<int> members(from, path.end());
      std::sort(members.begin(), members.end());
      cycles.push_back(std::move(members));
    }
    for (int id : path) mark[static_cast<std::size_t>(id)] = Mark::Done;
  }
  return cycles;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ", ";
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

std::string_view severity_name(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

std::span<const std::string_view> universal_upos() { return kUpos; }
std::span<const std::string_view> universal_deprels() { return kDeprels; }
std::span<const std::string_view> known_deprel_subtypes() { return kSubtypes; }

std::string_view deprel_base(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

std::vector<ValidationIssue> validate_sentence(const Sentence& sent) {
  std::vector<ValidationIssue> issues;
  const int n = static_cast<int>(sent.size());

  int roots = 0;
  for (const auto& t : sent.tokens) {
    if (t.head && *t.head == 0) ++roots;
  }
  if (roots != 1) {
    issues.push_back(issue(issue_code::kRootCount, Severity::Error, std::nullopt,
                           "expected exactly one token attached to the root, found " +
                               std::to_string(roots)));
  }

  for (const auto& cycle : find_cycles(sent)) {
    issues.push_back(issue(issue_code::kCycle, Severity::Error, cycle.front(),
                           "tokens " + join_ids(cycle) + " form a head cycle"));
  }

  for (const auto& t : sent.tokens) {
    const auto id = t.id;
    if (t.head) {
      if (*t.head > n) {
        issues.push_back(issue(issue_code::kHeadOutOfRange, Severity::Error, id,
                               "HEAD " + std::to_string(*t.head) + " is outside 0.." +
                                   std::to_string(n)));
      }
      if (*t.head == id) {
        issues.push_back(
            issue(issue_code::kSelfHead, Severity::Error, id, "token " + id_str(id) + " heads itself"));
      }
    }
    if (t.head && t.deprel) {
      const bool is_root_label = deprel_base(*t.deprel) == "root";
      if ((*t.head == 0) != is_root_label) {
        issues.push_back(issue(issue_code::kRootLabel, Severity::Error, id,
                               *t.head == 0 ? "token attached to the root must have DEPREL root"
                                            : "DEPREL root is only valid with HEAD 0"));
      }
    }
    if (t.upos && !contains_sorted(kUpos, *t.upos)) {
      issues.push_back(issue(issue_code::kUposUnknown, Severity::Error, id,
                             "unknown UPOS '" + *t.upos + "'"));
    }
    if (t.deprel) {
      const auto base = deprel_base(*t.deprel);
      if (!contains_sorted(kDeprels, base)) {
        issues.push_back(issue(issue_code::kDeprelUnknown, Severity::Error, id,
                               "unknown DEPREL '" + *t.deprel + "'"));
      } else if (base.size() != t.deprel->size() && !contains_sorted(kSubtypes, *t.deprel)) {
        issues.push_back(issue(issue_code::kDeprelSubtype, Severity::Warning, id,
                               "unknown relation subtype '" + *t.deprel + "'"));
      }
    }
    if (!t.feats.is_canonical()) {
      issues.push_back(issue(issue_code::kFeatsOrder, Severity::Warning, id,
                             "FEATS are not in canonical order, expected '" +
                                 serialize_feats(t.feats) + "'"));
    }
    for (const auto& [name, value] : t.feats.entries()) {
      if (!valid_feature_name(name) || !valid_feature_value(value)) {
        issues.push_back(issue(issue_code::kFeatsFormat, Severity::Error, id,
                               "malformed feature '" + name + "=" + value + "'"));
      }
    }
    if (!t.upos) {
      issues.push_back(issue(issue_code::kUnsetField, Severity::Warning, id, "UPOS is unset"));
    }
    if (!t.head) {
      issues.push_back(issue(issue_code::kUnsetField, Severity::Warning, id, "HEAD is unset"));
    }
    if (!t.deprel) {
      issues.push_back(issue(issue_code::kUnsetField, Severity::Warning, id, "DEPREL is unset"));
    }
  }

  std::stable_sort(issues.begin(), issues.end(),
                   [](const ValidationIssue& a, const ValidationIssue& b) {
                     const int ta = a.token_id.value_or(0);
                     const int tb = b.token_id.value_or(0);
                     if (ta != tb) return ta < tb;
                     return a.code < b.code;
                   });
  return issues;
}

DocumentIssues validate_document(const Document& doc) {
  DocumentIssues out;
  out.reserve(doc.sentences.size());
  std::unordered_map<std::string, std::size_t> first_seen;
  for (const auto& sent : doc.sentences) {
    auto issues = validate_sentence(sent);
    const auto [it, inserted] = first_seen.emplace(sent.sent_id, out.size());
    if (!inserted) {
      issues.push_back(issue(issue_code::kDuplicateSentId, Severity::Error, std::nullopt,
                             "sent_id '" + sent.sent_id + "' is used by an earlier sentence"));
    }
    out.emplace_back(sent.sent_id, std::move(issues));
  }
  return out;
}

bool has_errors(std::span<const ValidationIssue> issues) {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

std::vector<ValidationIssue> blocking_issues(std::span<const ValidationIssue> issues) {
  std::vector<ValidationIssue> out;
  std::copy_if(issues.begin(), issues.end(), std::back_inserter(out),
               [](const ValidationIssue& i) { return i.severity == Severity::Error; });
  return out;
}

}  // namespace boat
