#include "boat/errors.hpp"

#include "boat/validation.hpp"

namespace boat {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MALFORMED_LINE";
    case ErrorCode::NonContiguousIds: return "NON_CONTIGUOUS_IDS";
    case ErrorCode::DuplicateSentId: return "DUPLICATE_SENT_ID";
    case ErrorCode::MalformedFeature: return "MALFORMED_FEATURE";
    case ErrorCode::InvalidSentence: return "INVALID_SENTENCE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::TokenNotFound: return "TOKEN_NOT_FOUND";
    case ErrorCode::AlreadySplit: return "ALREADY_SPLIT";
    case ErrorCode::TooFewParts: return "TOO_FEW_PARTS";
    case ErrorCode::InvalidRange: return "INVALID_RANGE";
    case ErrorCode::DanglingHeads: return "DANGLING_HEADS";
    case ErrorCode::QuerySyntaxError: return "QUERY_SYNTAX_ERROR";
    case ErrorCode::BadRegex: return "BAD_REGEX";
    case ErrorCode::UnknownTreebank: return "UNKNOWN_TREEBANK";
    case ErrorCode::UnknownAnnotator: return "UNKNOWN_ANNOTATOR";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::DuplicateTreebank: return "DUPLICATE_TREEBANK";
    case ErrorCode::DuplicateAnnotator: return "DUPLICATE_ANNOTATOR";
    case ErrorCode::RevisionConflict: return "REVISION_CONFLICT";
    case ErrorCode::CompleteWithErrors: return "COMPLETE_WITH_ERRORS";
    case ErrorCode::InvalidStatus: return "INVALID_STATUS";
    case ErrorCode::NoComparableSentences: return "NO_COMPARABLE_SENTENCES";
    case ErrorCode::CyclicGraph: return "CYCLIC_GRAPH";
    case ErrorCode::Unauthorized: return "UNAUTHORIZED";
    case ErrorCode::Forbidden: return "FORBIDDEN";
    case ErrorCode::BadRequest: return "BAD_REQUEST";
    case ErrorCode::StorageError: return "STORAGE_ERROR";
  }
  return "UNKNOWN";
}

ParseError::ParseError(ErrorCode code, std::size_t line, const std::string& message)
    : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

QuerySyntaxError::QuerySyntaxError(ErrorCode code, std::size_t position,
                                   const std::string& message)
    : Error(code, "at position " + std::to_string(position) + ": " + message),
      position_(position) {}

RevisionConflict::RevisionConflict(std::int64_t expected, std::int64_t current)
    : Error(ErrorCode::RevisionConflict,
            "expected revision " + std::to_string(expected) + " but the stored revision is " +
                std::to_string(current)),
      expected_(expected),
      current_(current) {}

CompleteWithErrors::CompleteWithErrors(std::vector<ValidationIssue> issues)
    : Error(ErrorCode::CompleteWithErrors,
            "cannot mark sentence Complete: " + std::to_string(issues.size()) +
                " blocking validation error(s)"),
      issues_(std::move(issues)) {}

CompleteWithErrors::~CompleteWithErrors() = default;
CompleteWithErrors::CompleteWithErrors(const CompleteWithErrors&) = default;

}  // namespace boat
