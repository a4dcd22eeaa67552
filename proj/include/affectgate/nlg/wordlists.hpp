#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "affectgate/nlg/tokenize.hpp"

namespace affectgate::nlg {

// One word per line; blank lines and lines starting with '#' are ignored.
// Words are normalized like corpus tokens.
WordSet load_word_list(std::istream& in);
WordSet load_word_list_file(const std::filesystem::path& path);

// Built-in list of common English function words.
const WordSet& default_stopwords();

// True for stop words and for all-digit tokens.
bool is_filtered(std::string_view word, const WordSet& stopwords);

}  // namespace affectgate::nlg
