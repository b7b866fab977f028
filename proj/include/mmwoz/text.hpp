#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmwoz::text {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_value(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);

/// "9:05" -> "09:05"; returns empty when the value is not an H:MM / HH:MM time.
std::string normalize_time(std::string_view s);

/// Lowercase, collapse whitespace, strip punctuation at token edges.
/// Used for entity matching inside free-text responses.
std::string normalize_for_match(std::string_view s);

/// Element-id component: lowercase with spaces mapped to '_'.
std::string id_component(std::string_view s);

}  // namespace mmwoz::text
