#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace boat {

struct ValidationIssue;

/// Every failure the library can report. The names returned by
/// error_code_name() are part of the HTTP API contract.
enum class ErrorCode {
  MalformedLine,
  NonContiguousIds,
  DuplicateSentId,
  MalformedFeature,
  InvalidSentence,
  InvalidArgument,
  TokenNotFound,
  AlreadySplit,
  TooFewParts,
  InvalidRange,
  DanglingHeads,
  QuerySyntaxError,
  BadRegex,
  UnknownTreebank,
  UnknownAnnotator,
  NotFound,
  DuplicateTreebank,
  DuplicateAnnotator,
  RevisionConflict,
  CompleteWithErrors,
  InvalidStatus,
  NoComparableSentences,
  CyclicGraph,
  Unauthorized,
  Forbidden,
  BadRequest,
  StorageError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// CoNLL-U input problem, located by 1-based line number.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class QuerySyntaxError : public Error {
 public:
  QuerySyntaxError(ErrorCode code, std::size_t position, const std::string& message);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class RevisionConflict : public Error {
 public:
  RevisionConflict(std::int64_t expected, std::int64_t current);

  std::int64_t expected_revision() const noexcept { return expected_; }
  std::int64_t current_revision() const noexcept { return current_; }

 private:
  std::int64_t expected_;
  std::int64_t current_;
};

class CompleteWithErrors : public Error {
 public:
  explicit CompleteWithErrors(std::vector<ValidationIssue> issues);
  ~CompleteWithErrors() override;
  CompleteWithErrors(const CompleteWithErrors&);

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

}  // namespace boat
