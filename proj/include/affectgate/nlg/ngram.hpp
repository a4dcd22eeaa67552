#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affectgate/nlg/tokenize.hpp"

namespace affectgate::nlg {

enum class Direction { forward, reverse };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view name);

// Pads contexts at sentence edges. The tokenizer never emits '<' so the
// marker cannot collide with a corpus word; it is never a predicted word.
inline constexpr std::string_view kBoundary = "<s>";

using Context = std::vector<std::string>;

// Lexicographic ordering usable with any contiguous range of strings, so
// lookups can take a span without building a vector.
struct ContextLess {
  using is_transparent = void;
  template <typename A, typename B>
  bool operator()(const A& a, const B& b) const {
    return std::lexicographical_compare(std::begin(a), std::end(a), std::begin(b), std::end(b));
  }
};

using WordCounts = std::map<std::string, std::uint64_t, std::less<>>;
using ContinuationTable = std::map<Context, WordCounts, ContextLess>;

// Add-one smoothed n-gram model of one order and direction.
//
// Reverse models are trained on sentences with token order flipped, so a
// reverse context holds the words that follow the predicted position,
// nearest word last.
class NgramModel {
 public:
  static constexpr double kAlpha = 1.0;

  // Builds from raw continuation counts (e.g. a deserialized bundle).
  // Throws DataError if the table references a word outside the vocabulary,
  // a context of the wrong length, a boundary marker in predicted position,
  // or a zero count.
  NgramModel(int order, Direction direction, std::shared_ptr<const WordSet> vocabulary,
             ContinuationTable continuations);

  // Throws DataError for an empty corpus, std::invalid_argument for an
  // order other than 2 or 3.
  static NgramModel train(const TokenizedCorpus& corpus, int order, Direction direction,
                          std::shared_ptr<const WordSet> vocabulary = nullptr);

  int order() const noexcept { return order_; }
  Direction direction() const noexcept { return direction_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_->size(); }
  const WordSet& vocabulary() const noexcept { return *vocabulary_; }
  const std::shared_ptr<const WordSet>& shared_vocabulary() const noexcept { return vocabulary_; }

  // C(context), summed over continuations.
  std::uint64_t context_count(std::span<const std::string> context) const;
  // C(context, word)
  std::uint64_t count(std::span<const std::string> context, std::string_view word) const;

  const ContinuationTable& continuations() const noexcept { return continuations_; }
  const std::map<Context, std::uint64_t, ContextLess>& context_counts() const noexcept {
    return context_counts_;
  }

 private:
  int order_;
  Direction direction_;
  std::shared_ptr<const WordSet> vocabulary_;
  ContinuationTable continuations_;
  std::map<Context, std::uint64_t, ContextLess> context_counts_;
};

// (C(context, word) + 1) / (C(context) + D). Throws std::invalid_argument if
// the context length is not order - 1.
double ngram_prob(const NgramModel& model, std::span<const std::string> context,
                  std::string_view word);

// Trigram estimate, falling back to the bigram on the nearest context word
// when the trigram context was never observed. Throws std::invalid_argument
// if the models differ in direction or vocabulary.
double backoff_prob(const NgramModel& trigram, const NgramModel& bigram,
                    std::span<const std::string> context2, std::string_view word);

}  // namespace affectgate::nlg
