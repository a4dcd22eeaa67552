#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affectgate/game/choice.hpp"
#include "affectgate/nlg/lexicon.hpp"
#include "affectgate/nlg/ngram.hpp"
#include "affectgate/nlg/templates.hpp"

namespace affectgate::nlg {

// Forward and reverse bigram/trigram models over one shared vocabulary.
struct BidirectionalModel {
  NgramModel forward_trigram;
  NgramModel reverse_trigram;
  NgramModel forward_bigram;
  NgramModel reverse_bigram;

  static BidirectionalModel train(const TokenizedCorpus& corpus);

  const WordSet& vocabulary() const noexcept { return forward_trigram.vocabulary(); }

  // Throws std::invalid_argument if orders, directions or vocabularies do
  // not line up.
  void validate() const;
};

// Equal weight of each term in the mixture.
inline constexpr double kMixtureWeight = 0.2;

struct BlankPrediction {
  std::string word;
  double mixture_score = 0.0;
  // weight * {P_f3, P_r3, P_f2, P_r2, A}
  std::array<double, 5> component_scores{};
  // A = |valence| / 5
  double affect_score = 0.0;
};

// Two-token contexts for the blank: forward from the preceding words,
// reverse from the following words (nearest last), boundary padded.
struct BlankContexts {
  std::array<std::string, 2> forward;
  std::array<std::string, 2> reverse;
};
BlankContexts blank_contexts(const SentenceTemplate& tpl);

// Scores one candidate, or nullopt if it is a stop word, a numeral, or
// lacks the target valence.
std::optional<BlankPrediction> mixture_score(const SentenceTemplate& tpl, std::string_view candidate,
                                             const BidirectionalModel& models,
                                             const AffectLexicon& lexicon, game::Affect target,
                                             const WordSet& stopwords);

struct PredictOptions {
  std::size_t top_k = 2;
};

// Scores every vocabulary word, drops filtered and blocklisted ones, sorts
// by score descending with ties broken by word ascending, keeps the top k.
std::vector<BlankPrediction> predict_blank(const SentenceTemplate& tpl, game::Affect target,
                                           const BidirectionalModel& models,
                                           const AffectLexicon& lexicon, const WordSet& stopwords,
                                           const WordSet& blocklist, PredictOptions options = {});

}  // namespace affectgate::nlg
