#include "affectgate/nlg/predictor.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "affectgate/nlg/wordlists.hpp"

namespace affectgate::nlg {

BidirectionalModel BidirectionalModel::train(const TokenizedCorpus& corpus) {
  auto vocab = std::make_shared<const WordSet>(corpus.vocabulary);
  return BidirectionalModel{
      NgramModel::train(corpus, 3, Direction::forward, vocab),
      NgramModel::train(corpus, 3, Direction::reverse, vocab),
      NgramModel::train(corpus, 2, Direction::forward, vocab),
      NgramModel::train(corpus, 2, Direction::reverse, vocab),
  };
}

void BidirectionalModel::validate() const {
  auto expect = [](const NgramModel& m, int order, Direction d, const char* name) {
    if (m.order() != order || m.direction() != d)
      throw std::invalid_argument(std::string("model slot ") + name + " holds the wrong model");
  };
  expect(forward_trigram, 3, Direction::forward, "forward_trigram");
  expect(reverse_trigram, 3, Direction::reverse, "reverse_trigram");
  expect(forward_bigram, 2, Direction::forward, "forward_bigram");
  expect(reverse_bigram, 2, Direction::reverse, "reverse_bigram");
  const auto& v = forward_trigram.shared_vocabulary();
  for (const auto* m : {&reverse_trigram, &forward_bigram, &reverse_bigram})
    if (m->shared_vocabulary() != v && m->vocabulary() != *v)
      throw std::invalid_argument("bidirectional models do not share a vocabulary");
}

BlankContexts blank_contexts(const SentenceTemplate& tpl) {
  const std::string boundary(kBoundary);
  BlankContexts c{{boundary, boundary}, {boundary, boundary}};
  const auto& pre = tpl.prefix_tokens;
  if (!pre.empty()) c.forward[1] = pre[pre.size() - 1];
  if (pre.size() >= 2) c.forward[0] = pre[pre.size() - 2];
  const auto& suf = tpl.suffix_tokens;
  if (!suf.empty()) c.reverse[1] = suf[0];
  if (suf.size() >= 2) c.reverse[0] = suf[1];
  return c;
}

namespace {

std::optional<BlankPrediction> score_with_contexts(const BlankContexts& ctx,
                                                   std::string_view candidate,
                                                   const BidirectionalModel& models,
                                                   const AffectLexicon& lexicon,
                                                   game::Affect target, const WordSet& stopwords) {
  if (is_filtered(candidate, stopwords)) return std::nullopt;
  const auto affect = affect_score(candidate, lexicon, target);
  if (!affect) return std::nullopt;

  const std::array<double, 5> raw{
      backoff_prob(models.forward_trigram, models.forward_bigram, ctx.forward, candidate),
      backoff_prob(models.reverse_trigram, models.reverse_bigram, ctx.reverse, candidate),
      ngram_prob(models.forward_bigram, std::span(ctx.forward).subspan(1), candidate),
      ngram_prob(models.reverse_bigram, std::span(ctx.reverse).subspan(1), candidate),
      *affect,
  };
  BlankPrediction p;
  p.word = std::string(candidate);
  p.affect_score = *affect;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    p.component_scores[i] = kMixtureWeight * raw[i];
    p.mixture_score += p.component_scores[i];
  }
  return p;
}

}  // namespace

std::optional<BlankPrediction> mixture_score(const SentenceTemplate& tpl, std::string_view candidate,
                                             const BidirectionalModel& models,
                                             const AffectLexicon& lexicon, game::Affect target,
                                             const WordSet& stopwords) {
  return score_with_contexts(blank_contexts(tpl), candidate, models, lexicon, target, stopwords);
}

std::vector<BlankPrediction> predict_blank(const SentenceTemplate& tpl, game::Affect target,
                                           const BidirectionalModel& models,
                                           const AffectLexicon& lexicon, const WordSet& stopwords,
                                           const WordSet& blocklist, PredictOptions options) {
  const auto ctx = blank_contexts(tpl);
  std::vector<BlankPrediction> scored;
  for (const auto& word : models.vocabulary()) {
    if (blocklist.contains(word)) continue;
    if (auto p = score_with_contexts(ctx, word, models, lexicon, target, stopwords))
      scored.push_back(std::move(*p));
  }
  std::sort(scored.begin(), scored.end(), [](const BlankPrediction& a, const BlankPrediction& b) {
    if (a.mixture_score != b.mixture_score) return a.mixture_score > b.mixture_score;
    return a.word < b.word;
  });
  if (scored.size() > options.top_k) scored.resize(options.top_k);
  return scored;
}

}  // namespace affectgate::nlg
