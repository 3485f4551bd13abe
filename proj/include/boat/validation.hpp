#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boat/conllu.hpp"

namespace boat {

enum class Severity { Error, Warning };

std::string_view severity_name(Severity severity);

/// Stable rule identifiers. Their string forms are part of the API.
namespace issue_code {
inline constexpr std::string_view kRootCount = "ROOT_COUNT";
inline constexpr std::string_view kRootLabel = "ROOT_LABEL";
inline constexpr std::string_view kHeadOutOfRange = "HEAD_OUT_OF_RANGE";
inline constexpr std::string_view kSelfHead = "SELF_HEAD";
inline constexpr std::string_view kCycle = "CYCLE";
inline constexpr std::string_view kUposUnknown = "UPOS_UNKNOWN";
inline constexpr std::string_view kDeprelUnknown = "DEPREL_UNKNOWN";
inline constexpr std::string_view kDeprelSubtype = "DEPREL_SUBTYPE";
inline constexpr std::string_view kFeatsOrder = "FEATS_ORDER";
inline constexpr std::string_view kFeatsFormat = "FEATS_FORMAT";
inline constexpr std::string_view kUnsetField = "UNSET_FIELD";
inline constexpr std::string_view kDuplicateSentId = "DUPLICATE_SENT_ID";
}  // namespace issue_code

struct ValidationIssue {
  std::string code;
  Severity severity = Severity::Error;
  std::optional<int> token_id;  // nullopt for sentence-level issues
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

/// The 17 universal part-of-speech tags, sorted.
std::span<const std::string_view> universal_upos();
/// The 37 universal dependency relations, sorted.
std::span<const std::string_view> universal_deprels();
/// Relation subtypes ("nmod:poss", ...) accepted without a warning, sorted.
std::span<const std::string_view> known_deprel_subtypes();

/// Relation without its subtype: "nmod:poss" -> "nmod".
std::string_view deprel_base(std::string_view deprel);

/// Runs every rule of the registry. Issues are ordered by token id
/// (sentence-level first), then by code.
std::vector<ValidationIssue> validate_sentence(const Sentence& sent);

using DocumentIssues = std::vector<std::pair<std::string, std::vector<ValidationIssue>>>;

/// Per-sentence issues in document order, keyed by sent_id. A repeated
/// sent_id gets a DUPLICATE_SENT_ID issue appended to its entry.
DocumentIssues validate_document(const Document& doc);

bool has_errors(std::span<const ValidationIssue> issues);
std::vector<ValidationIssue> blocking_issues(std::span<const ValidationIssue> issues);

}  // namespace boat
