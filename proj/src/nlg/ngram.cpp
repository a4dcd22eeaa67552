#include "affectgate/nlg/ngram.hpp"

#include <stdexcept>

#include "affectgate/core/error.hpp"

namespace affectgate::nlg {

std::string_view to_string(Direction d) noexcept {
  return d == Direction::forward ? "forward" : "reverse";
}

Direction parse_direction(std::string_view name) {
  if (name == "forward") return Direction::forward;
  if (name == "reverse") return Direction::reverse;
  throw DataError("unknown direction '" + std::string(name) + "'");
}

NgramModel::NgramModel(int order, Direction direction, std::shared_ptr<const WordSet> vocabulary,
                       ContinuationTable continuations)
    : order_(order),
      direction_(direction),
      vocabulary_(std::move(vocabulary)),
      continuations_(std::move(continuations)) {
  if (order_ != 2 && order_ != 3) throw std::invalid_argument("n-gram order must be 2 or 3");
  if (!vocabulary_ || vocabulary_->empty()) throw DataError("n-gram model needs a nonempty vocabulary");
  for (const auto& [context, words] : continuations_) {
    if (context.size() != static_cast<std::size_t>(order_ - 1))
      throw DataError("context of length " + std::to_string(context.size()) + " in order-" +
                      std::to_string(order_) + " model");
    for (const auto& c : context)
      if (c != kBoundary && !vocabulary_->contains(c))
        throw DataError("context word '" + c + "' not in vocabulary");
    std::uint64_t total = 0;
    for (const auto& [word, n] : words) {
      if (!vocabulary_->contains(word)) throw DataError("word '" + word + "' not in vocabulary");
      if (n == 0) throw DataError("zero count for '" + word + "'");
      total += n;
    }
    if (total > 0) context_counts_.emplace(context, total);
  }
}

NgramModel NgramModel::train(const TokenizedCorpus& corpus, int order, Direction direction,
                             std::shared_ptr<const WordSet> vocabulary) {
  if (order != 2 && order != 3) throw std::invalid_argument("n-gram order must be 2 or 3");
  if (corpus.empty()) throw DataError("empty corpus");
  if (!vocabulary) vocabulary = std::make_shared<const WordSet>(corpus.vocabulary);

  ContinuationTable table;
  const std::size_t history = static_cast<std::size_t>(order - 1);
  std::vector<std::string> padded;
  for (const auto& sentence : corpus.sentences) {
    padded.assign(history, std::string(kBoundary));
    if (direction == Direction::forward)
      padded.insert(padded.end(), sentence.begin(), sentence.end());
    else
      padded.insert(padded.end(), sentence.rbegin(), sentence.rend());
    for (std::size_t i = history; i < padded.size(); ++i) {
      Context context(padded.begin() + static_cast<std::ptrdiff_t>(i - history),
                      padded.begin() + static_cast<std::ptrdiff_t>(i));
      ++table[std::move(context)][padded[i]];
    }
  }
  return NgramModel(order, direction, std::move(vocabulary), std::move(table));
}

std::uint64_t NgramModel::context_count(std::span<const std::string> context) const {
  const auto it = context_counts_.find(context);
  return it == context_counts_.end() ? 0 : it->second;
}

std::uint64_t NgramModel::count(std::span<const std::string> context, std::string_view word) const {
  const auto it = continuations_.find(context);
  if (it == continuations_.end()) return 0;
  const auto w = it->second.find(word);
  return w == it->second.end() ? 0 : w->second;
}

double ngram_prob(const NgramModel& model, std::span<const std::string> context,
                  std::string_view word) {
  if (context.size() != static_cast<std::size_t>(model.order() - 1))
    throw std::invalid_argument("context length " + std::to_string(context.size()) +
                                " does not match order " + std::to_string(model.order()));
  const double numerator = static_cast<double>(model.count(context, word)) + NgramModel::kAlpha;
  const double denominator = static_cast<double>(model.context_count(context)) +
                             NgramModel::kAlpha * static_cast<double>(model.vocabulary_size());
  return numerator / denominator;
}

double backoff_prob(const NgramModel& trigram, const NgramModel& bigram,
                    std::span<const std::string> context2, std::string_view word) {
  if (trigram.order() != 3 || bigram.order() != 2)
    throw std::invalid_argument("backoff needs an order-3 and an order-2 model");
  if (trigram.direction() != bigram.direction())
    throw std::invalid_argument("backoff models differ in direction");
  if (trigram.shared_vocabulary() != bigram.shared_vocabulary() &&
      trigram.vocabulary() != bigram.vocabulary())
    throw std::invalid_argument("backoff models differ in vocabulary");
  if (context2.size() != 2) throw std::invalid_argument("trigram context must have 2 tokens");
  if (trigram.context_count(context2) == 0) return ngram_prob(bigram, context2.subspan(1), word);
  return ngram_prob(trigram, context2, word);
}

}  // namespace affectgate::nlg
