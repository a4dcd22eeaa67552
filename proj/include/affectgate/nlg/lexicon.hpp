#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "affectgate/game/choice.hpp"

namespace affectgate::nlg {

// Word -> valence in [-5, 5] \ {0}. Keys are normalized like corpus tokens.
class AffectLexicon {
 public:
  AffectLexicon() = default;
  // Throws std::invalid_argument for zero or out-of-range valence.
  explicit AffectLexicon(std::map<std::string, int, std::less<>> valence);

  std::optional<int> valence(std::string_view word) const;
  std::size_t size() const noexcept { return valence_.size(); }
  const std::map<std::string, int, std::less<>>& entries() const noexcept { return valence_; }

 private:
  std::map<std::string, int, std::less<>> valence_;
};

struct LexiconLoadReport {
  std::size_t loaded = 0;
  std::size_t skipped_zero = 0;
  std::size_t merged_duplicates = 0;
};

// AFINN TSV: `word<TAB>integer` per line. Zero-valence entries are dropped
// (or rejected with strict = true). Keys that normalize to the same token
// keep the first value when they agree; conflicting duplicates throw.
// Throws ParseError naming the line.
AffectLexicon load_afinn(std::istream& in, LexiconLoadReport* report = nullptr, bool strict = false);
AffectLexicon load_afinn_file(const std::filesystem::path& path, LexiconLoadReport* report = nullptr,
                              bool strict = false);

// |valence| / 5 when the word's valence sign matches the target class,
// nullopt otherwise. Target must be negative or positive.
std::optional<double> affect_score(std::string_view word, const AffectLexicon& lexicon,
                                   game::Affect target);

}  // namespace affectgate::nlg
