#include "affectgate/nlg/templates.hpp"

#include <fstream>
#include <istream>

#include <json.hpp>

#include "affectgate/core/error.hpp"
#include "affectgate/nlg/tokenize.hpp"

namespace affectgate::nlg {

std::string SentenceTemplate::fill(std::string_view word) const {
  std::string out = raw_text;
  const auto pos = out.find(blank);
  if (pos != std::string::npos) out.replace(pos, blank.size(), word);
  return out;
}

SentenceTemplate parse_template(std::string_view text, std::string_view blank) {
  if (blank.empty()) throw DataError("template blank marker is empty");
  const auto pos = text.find(blank);
  if (pos == std::string_view::npos)
    throw DataError("template has no blank '" + std::string(blank) + "': " + std::string(text));
  if (text.find(blank, pos + blank.size()) != std::string_view::npos)
    throw DataError("template has more than one blank: " + std::string(text));
  SentenceTemplate t;
  t.prefix_tokens = tokenize_words(text.substr(0, pos));
  t.suffix_tokens = tokenize_words(text.substr(pos + blank.size()));
  t.raw_text = std::string(text);
  t.blank = std::string(blank);
  return t;
}

std::vector<SentenceTemplate> load_templates(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed templates JSON: ") + e.what());
  }
  if (!j.is_array()) throw DataError("templates file must hold a JSON array");
  std::vector<SentenceTemplate> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string())
      throw DataError("template " + std::to_string(i + 1) + ": missing \"text\"");
    const std::string blank = item.value("blank", std::string(kDefaultBlank));
    try {
      out.push_back(parse_template(item["text"].get<std::string>(), blank));
    } catch (const DataError& e) {
      throw DataError("template " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SentenceTemplate> load_templates_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open templates " + path.string());
  try {
    return load_templates(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace affectgate::nlg
