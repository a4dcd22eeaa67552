#include "affectgate/nlg/lexicon.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "affectgate/core/error.hpp"
#include "affectgate/nlg/tokenize.hpp"

namespace affectgate::nlg {

AffectLexicon::AffectLexicon(std::map<std::string, int, std::less<>> valence)
    : valence_(std::move(valence)) {
  for (const auto& [word, v] : valence_)
    if (v == 0 || v < -5 || v > 5)
      throw std::invalid_argument("valence of '" + word + "' must be in [-5, 5] and nonzero");
}

std::optional<int> AffectLexicon::valence(std::string_view word) const {
  const auto it = valence_.find(word);
  if (it == valence_.end()) return std::nullopt;
  return it->second;
}

AffectLexicon load_afinn(std::istream& in, LexiconLoadReport* report, bool strict) {
  std::map<std::string, int, std::less<>> entries;
  LexiconLoadReport stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected word<TAB>integer");
    const std::string word = normalize_word(std::string_view(line).substr(0, tab));
    const std::string_view number = std::string_view(line).substr(tab + 1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
    if (ec != std::errc() || ptr != number.data() + number.size())
      throw ParseError(line_no, "bad valence '" + std::string(number) + "'");
    if (v < -5 || v > 5) throw ParseError(line_no, "valence " + std::to_string(v) + " outside [-5, 5]");
    if (word.empty()) throw ParseError(line_no, "empty word");
    if (v == 0) {
      if (strict) throw ParseError(line_no, "zero valence for '" + word + "'");
      ++stats.skipped_zero;
      continue;
    }
    const auto [it, inserted] = entries.emplace(word, v);
    if (!inserted) {
      if (it->second != v)
        throw ParseError(line_no, "conflicting valence for '" + word + "'");
      ++stats.merged_duplicates;
    }
  }
  stats.loaded = entries.size();
  if (report) *report = stats;
  return AffectLexicon(std::move(entries));
}

AffectLexicon load_afinn_file(const std::filesystem::path& path, LexiconLoadReport* report,
                              bool strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  try {
    return load_afinn(in, report, strict);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  }
}

std::optional<double> affect_score(std::string_view word, const AffectLexicon& lexicon,
                                   game::Affect target) {
  if (target == game::Affect::none) throw std::invalid_argument("affect target must be negative or positive");
  const auto v = lexicon.valence(word);
  if (!v) return std::nullopt;
  const bool positive = *v > 0;
  if (positive != (target == game::Affect::positive)) return std::nullopt;
  return std::abs(*v) / 5.0;
}

}  // namespace affectgate::nlg
