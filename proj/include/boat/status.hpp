#pragma once

#include <optional>
#include <string_view>

namespace boat {

/// Annotation workflow state of one annotator's copy of a sentence.
enum class Status { New, Draft, Complete };

std::string_view status_name(Status status);

/// Accepts "New", "Draft", "Complete" (case-insensitive).
std::optional<Status> parse_status(std::string_view text);

}  // namespace boat
