#include "affectgate/nlg/utterance.hpp"

#include <numeric>
#include <stdexcept>

#include "affectgate/core/error.hpp"

namespace affectgate::nlg {

std::vector<std::string> UtterancePool::sentences() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.text);
  return out;
}

UtterancePool build_utterance_pool(std::span<const SentenceTemplate> templates, game::Affect affect,
                                   const BidirectionalModel& models, const AffectLexicon& lexicon,
                                   const WordSet& stopwords, const WordSet& blocklist,
                                   PoolOptions options) {
  UtterancePool pool;
  pool.affect = affect;
  for (const auto& tpl : templates) {
    if (options.max_entries != 0 && pool.entries.size() >= options.max_entries) break;
    auto ranked = predict_blank(tpl, affect, models, lexicon, stopwords, blocklist, {options.top_k});
    if (ranked.empty()) {
      pool.unfilled.push_back(tpl.raw_text);
      continue;
    }
    std::string text = tpl.fill(ranked.front().word);
    pool.entries.push_back({tpl.raw_text, std::move(text), std::move(ranked)});
  }
  return pool;
}

nlohmann::json pool_to_json(const UtterancePool& pool) {
  auto entries = nlohmann::json::array();
  for (const auto& e : pool.entries) {
    auto candidates = nlohmann::json::array();
    for (const auto& c : e.candidates)
      candidates.push_back({{"word", c.word},
                            {"mixture_score", c.mixture_score},
                            {"affect_score", c.affect_score},
                            {"components", c.component_scores}});
    entries.push_back({{"template", e.template_text},
                       {"text", e.text},
                       {"word", e.candidates.front().word},
                       {"mixture_score", e.candidates.front().mixture_score},
                       {"affect_score", e.candidates.front().affect_score},
                       {"candidates", std::move(candidates)}});
  }
  return {{"affect", game::to_string(pool.affect)},
          {"utterances", std::move(entries)},
          {"unfilled", pool.unfilled}};
}

UtterancePool pool_from_json(const nlohmann::json& j) {
  try {
    UtterancePool pool;
    pool.affect = game::parse_affect(j.at("affect").get<std::string>());
    for (const auto& e : j.at("utterances")) {
      PoolEntry entry{e.at("template").get<std::string>(), e.at("text").get<std::string>(), {}};
      for (const auto& c : e.at("candidates")) {
        BlankPrediction p;
        p.word = c.at("word").get<std::string>();
        p.mixture_score = c.at("mixture_score").get<double>();
        p.affect_score = c.at("affect_score").get<double>();
        p.component_scores = c.at("components").get<std::array<double, 5>>();
        entry.candidates.push_back(std::move(p));
      }
      if (entry.candidates.empty()) throw DataError("utterance without candidates");
      pool.entries.push_back(std::move(entry));
    }
    pool.unfilled = j.value("unfilled", std::vector<std::string>{});
    return pool;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed utterance pool: ") + e.what());
  }
}

UtteranceCycler::UtteranceCycler(std::vector<std::string> pool, std::uint64_t seed)
    : pool_(std::move(pool)), rng_(seed) {
  if (pool_.empty()) throw std::invalid_argument("utterance pool is empty");
  order_.resize(pool_.size());
  reshuffle();
}

void UtteranceCycler::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  rng_.shuffle(std::span(order_));
  cursor_ = 0;
}

const std::string& UtteranceCycler::next() {
  if (cursor_ == order_.size()) reshuffle();
  ++draws_;
  return pool_[order_[cursor_++]];
}

}  // namespace affectgate::nlg
