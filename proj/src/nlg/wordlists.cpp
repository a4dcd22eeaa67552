#include "affectgate/nlg/wordlists.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "affectgate/core/error.hpp"

namespace affectgate::nlg {

WordSet load_word_list(std::istream& in) {
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (auto& w : tokenize_words(line)) words.insert(std::move(w));
  }
  return words;
}

WordSet load_word_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list " + path.string());
  return load_word_list(in);
}

const WordSet& default_stopwords() {
  static const WordSet words{
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
      "arent", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
      "but", "by", "can", "cannot", "cant", "could", "couldnt", "did", "didnt", "do", "does",
      "doesnt", "doing", "dont", "down", "during", "each", "few", "for", "from", "further", "had",
      "hadnt", "has", "hasnt", "have", "havent", "having", "he", "her", "here", "hers", "herself",
      "him", "himself", "his", "how", "i", "if", "im", "in", "into", "is", "isnt", "it", "its",
      "itself", "ive", "just", "let", "me", "more", "most", "must", "my", "myself", "no", "nor",
      "not", "now", "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
      "ourselves", "out", "over", "own", "same", "shall", "she", "should", "shouldnt", "so",
      "some", "such", "than", "that", "thats", "the", "their", "theirs", "them", "themselves",
      "then", "there", "these", "they", "this", "those", "through", "to", "too", "under", "until",
      "up", "upon", "us", "very", "was", "wasnt", "we", "were", "werent", "what", "when", "where",
      "which", "while", "who", "whom", "why", "will", "with", "wont", "would", "wouldnt", "yet",
      "you", "youd", "youll", "your", "youre", "yours", "yourself", "yourselves", "youve",
      "also", "among", "may", "might", "shant", "whose", "within", "without", "ever", "every",
      "either", "neither", "though", "although", "unless", "whether",
  };
  return words;
}

bool is_filtered(std::string_view word, const WordSet& stopwords) {
  if (stopwords.contains(word)) return true;
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace affectgate::nlg
