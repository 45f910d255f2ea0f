#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dnb {

/// Flat "key = value" documents. One pair per line; '#' starts a comment
/// line; blank lines are skipped; surrounding whitespace of keys and values
/// is trimmed. A key may appear only once.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);
std::string render_key_values(const KeyValues& kv);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace dnb
