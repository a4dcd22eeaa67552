#include "affectgate/nlg/tokenize.hpp"

#include <cstdint>

namespace affectgate::nlg {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Malformed sequences decode as U+FFFD with length 1.
CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2018 || c == 0x2019; }
bool is_terminator(char32_t c) { return c == U'.' || c == U'?' || c == U'!' || c == U';'; }
bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0;
}
bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019;
}
bool is_ascii_alnum(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}
// Non-ASCII code points that act like punctuation or symbols.
bool is_symbol(char32_t c) {
  return (c >= 0x00A0 && c <= 0x00BF) || c == 0x00D7 || c == 0x00F7 ||
         (c >= 0x2000 && c <= 0x2BFF) || (c >= 0x3000 && c <= 0x303F) || c == 0xFFFD ||
         (c >= 0xFE30 && c <= 0xFE4F);
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  TokenizedCorpus run() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const auto cp = decode(text_, i);
      const std::size_t next = i + cp.length;
      if (cp.value < 0x80 && is_ascii_alnum(cp.value)) {
        char ch = static_cast<char>(cp.value);
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
        token_.push_back(ch);
      } else if (is_apostrophe(cp.value)) {
        // deleted: "don't" -> "dont"
      } else if (is_terminator(cp.value)) {
        end_token();
        if (ends_sentence(next)) end_sentence();
      } else if (cp.value >= 0x80 && !is_symbol(cp.value)) {
        token_.append(text_.substr(i, cp.length));
      } else {
        end_token();
      }
      i = next;
    }
    end_token();
    end_sentence();
    return std::move(corpus_);
  }

 private:
  bool ends_sentence(std::size_t i) const {
    while (i < text_.size()) {
      const auto cp = decode(text_, i);
      if (is_space(cp.value)) return true;
      if (!is_closer(cp.value)) return false;
      i += cp.length;
    }
    return true;
  }

  void end_token() {
    if (token_.empty()) return;
    corpus_.vocabulary.insert(token_);
    sentence_.push_back(std::move(token_));
    token_.clear();
  }

  void end_sentence() {
    if (!sentence_.empty()) corpus_.sentences.push_back(std::move(sentence_));
    sentence_.clear();
  }

  std::string_view text_;
  std::string token_;
  Sentence sentence_;
  TokenizedCorpus corpus_;
};

}  // namespace

void TokenizedCorpus::append(TokenizedCorpus other) {
  sentences.insert(sentences.end(), std::make_move_iterator(other.sentences.begin()),
                   std::make_move_iterator(other.sentences.end()));
  vocabulary.merge(other.vocabulary);
}

TokenizedCorpus tokenize(std::string_view text) { return Tokenizer(text).run(); }

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  for (auto& s : tokenize(text).sentences)
    words.insert(words.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return words;
}

std::string normalize_word(std::string_view word) {
  std::string out;
  for (const auto& w : tokenize_words(word)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace affectgate::nlg
