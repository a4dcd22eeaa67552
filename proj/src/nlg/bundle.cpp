#include "affectgate/nlg/bundle.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "affectgate/core/error.hpp"

namespace affectgate::nlg {

namespace {

constexpr const char* kFormat = "affectgate-ngram-bundle";

nlohmann::json model_to_json(const NgramModel& m,
                             const std::unordered_map<std::string_view, long long>& index) {
  auto id = [&](const std::string& w) { return w == kBoundary ? -1LL : index.at(w); };
  auto contexts = nlohmann::json::array();
  for (const auto& [context, words] : m.continuations()) {
    auto ctx = nlohmann::json::array();
    for (const auto& c : context) ctx.push_back(id(c));
    auto flat = nlohmann::json::array();
    for (const auto& [w, n] : words) {
      flat.push_back(id(w));
      flat.push_back(n);
    }
    contexts.push_back({std::move(ctx), std::move(flat)});
  }
  return {{"order", m.order()}, {"direction", to_string(m.direction())}, {"contexts", std::move(contexts)}};
}

NgramModel model_from_json(const nlohmann::json& j, const std::shared_ptr<const WordSet>& vocab,
                           const std::vector<std::string>& words) {
  auto word = [&](const nlohmann::json& v) -> std::string {
    const auto i = v.get<long long>();
    if (i == -1) return std::string(kBoundary);
    if (i < 0 || static_cast<std::size_t>(i) >= words.size()) throw DataError("word index out of range");
    return words[static_cast<std::size_t>(i)];
  };
  ContinuationTable table;
  for (const auto& entry : j.at("contexts")) {
    Context ctx;
    for (const auto& c : entry.at(0)) ctx.push_back(word(c));
    const auto& flat = entry.at(1);
    if (flat.size() % 2 != 0) throw DataError("odd continuation list");
    auto& counts = table[std::move(ctx)];
    for (std::size_t k = 0; k < flat.size(); k += 2) {
      const std::string w = word(flat[k]);
      if (w == kBoundary) throw DataError("boundary marker as a predicted word");
      counts[w] = flat[k + 1].get<std::uint64_t>();
    }
  }
  return NgramModel(j.at("order").get<int>(), parse_direction(j.at("direction").get<std::string>()),
                    vocab, std::move(table));
}

}  // namespace

void save_bundle(std::ostream& out, const BidirectionalModel& models) {
  models.validate();
  const auto& vocab = models.vocabulary();
  std::unordered_map<std::string_view, long long> index;
  std::vector<std::string> words(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], static_cast<long long>(i));
  nlohmann::json j{
      {"format", kFormat},
      {"version", kBundleVersion},
      {"vocabulary", words},
      {"models",
       {model_to_json(models.forward_trigram, index), model_to_json(models.reverse_trigram, index),
        model_to_json(models.forward_bigram, index), model_to_json(models.reverse_bigram, index)}},
  };
  out << j.dump() << '\n';
}

void save_bundle_file(const std::filesystem::path& path, const BidirectionalModel& models) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write bundle " + path.string());
  save_bundle(out, models);
  if (!out) throw DataError("error writing bundle " + path.string());
}

BidirectionalModel load_bundle(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed model bundle: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormat) throw DataError("not a model bundle");
    if (!j.contains("version")) throw DataError("model bundle has no version");
    const int version = j.at("version").get<int>();
    if (version != kBundleVersion)
      throw DataError("model bundle version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kBundleVersion) + "); retrain the bundle");
    auto words = j.at("vocabulary").get<std::vector<std::string>>();
    auto vocab = std::make_shared<const WordSet>(words.begin(), words.end());
    if (vocab->size() != words.size()) throw DataError("duplicate vocabulary entries");
    const auto& models = j.at("models");
    if (!models.is_array() || models.size() != 4) throw DataError("bundle must hold four models");
    BidirectionalModel out{
        model_from_json(models[0], vocab, words), model_from_json(models[1], vocab, words),
        model_from_json(models[2], vocab, words), model_from_json(models[3], vocab, words)};
    try {
      out.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model bundle: ") + e.what());
  }
}

BidirectionalModel load_bundle_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model bundle " + path.string());
  try {
    return load_bundle(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace affectgate::nlg
