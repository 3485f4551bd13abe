#include "boat/status.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace boat {

std::string_view status_name(Status status) {
  switch (status) {
    case Status::New: return "New";
    case Status::Draft: return "Draft";
    case Status::Complete: return "Complete";
  }
  return "New";
}

std::optional<Status> parse_status(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "new") return Status::New;
  if (lower == "draft") return Status::Draft;
  if (lower == "complete") return Status::Complete;
  return std::nullopt;
}

}  // namespace boat
