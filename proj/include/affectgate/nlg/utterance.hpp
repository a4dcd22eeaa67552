#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "affectgate/core/random.hpp"
#include "affectgate/nlg/predictor.hpp"

namespace affectgate::nlg {

struct PoolEntry {
  std::string template_text;
  std::string text;  // the filled sentence
  // Ranked candidates; the first one fills `text`.
  std::vector<BlankPrediction> candidates;
};

// Filled sentences for one affect condition.
struct UtterancePool {
  game::Affect affect = game::Affect::positive;
  std::vector<PoolEntry> entries;
  // Templates for which every candidate was filtered out.
  std::vector<std::string> unfilled;

  std::vector<std::string> sentences() const;
};

struct PoolOptions {
  std::size_t top_k = 2;
  // Keep at most this many entries; 0 keeps all.
  std::size_t max_entries = 0;
};

UtterancePool build_utterance_pool(std::span<const SentenceTemplate> templates, game::Affect affect,
                                   const BidirectionalModel& models, const AffectLexicon& lexicon,
                                   const WordSet& stopwords, const WordSet& blocklist,
                                   PoolOptions options = {});

nlohmann::json pool_to_json(const UtterancePool& pool);
// Throws DataError on a malformed document.
UtterancePool pool_from_json(const nlohmann::json& j);

// Deals sentences from a pool in seeded random order without repetition;
// when the pool is exhausted it is reshuffled and dealt again. Selection
// depends only on the seed and the number of draws so far.
class UtteranceCycler {
 public:
  // Throws std::invalid_argument for an empty pool.
  UtteranceCycler(std::vector<std::string> pool, std::uint64_t seed);

  const std::string& next();
  std::size_t draws() const noexcept { return draws_; }
  std::size_t pool_size() const noexcept { return pool_.size(); }

 private:
  void reshuffle();

  std::vector<std::string> pool_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t draws_ = 0;
  Rng rng_;
};

}  // namespace affectgate::nlg
