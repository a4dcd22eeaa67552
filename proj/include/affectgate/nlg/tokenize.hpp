#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace affectgate::nlg {

using Sentence = std::vector<std::string>;
using WordSet = std::set<std::string, std::less<>>;

// Sentences of lowercase word tokens plus the vocabulary they span.
struct TokenizedCorpus {
  std::vector<Sentence> sentences;
  WordSet vocabulary;

  std::size_t vocabulary_size() const noexcept { return vocabulary.size(); }
  bool empty() const noexcept { return vocabulary.empty(); }

  void append(TokenizedCorpus other);
};

// Splits text into sentences on . ? ! ; followed by whitespace or end of
// input (closing quotes and brackets may sit in between). Tokens are
// lowercased ASCII-alphanumeric runs; apostrophes are deleted inside words
// and every other punctuation or symbol character separates tokens.
// Numerals are kept. Empty sentences are dropped.
TokenizedCorpus tokenize(std::string_view text);

// All tokens of `text` with sentence boundaries ignored.
std::vector<std::string> tokenize_words(std::string_view text);

// Normalizes a single word the way the tokenizer would; returns "" when
// nothing survives, and the words joined by spaces if it splits.
std::string normalize_word(std::string_view word);

}  // namespace affectgate::nlg
