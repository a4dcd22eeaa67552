#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace affectgate::nlg {

inline constexpr std::string_view kDefaultBlank = "___";

// A sentence stem with exactly one blank.
struct SentenceTemplate {
  std::vector<std::string> prefix_tokens;
  std::vector<std::string> suffix_tokens;
  std::string raw_text;
  std::string blank{kDefaultBlank};

  // raw_text with the blank replaced by `word`.
  std::string fill(std::string_view word) const;
};

// Throws DataError unless `blank` occurs exactly once in `text`.
SentenceTemplate parse_template(std::string_view text, std::string_view blank = kDefaultBlank);

// JSON array of {"text": "...", "blank": "___"}; "blank" defaults to "___".
std::vector<SentenceTemplate> load_templates(std::istream& in);
std::vector<SentenceTemplate> load_templates_file(const std::filesystem::path& path);

}  // namespace affectgate::nlg
