#include "affectgate/nlg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "affectgate/core/error.hpp"

namespace affectgate::nlg {

TokenizedCorpus load_corpus_dir(const std::filesystem::path& dir,
                                std::vector<std::filesystem::path>* files_read) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw DataError("corpus directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".txt" && !entry.is_directory()) files.push_back(entry.path());
  if (files.empty()) throw DataError("no corpus files in " + dir.string());
  std::sort(files.begin(), files.end());

  TokenizedCorpus corpus;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw DataError("cannot read corpus file " + f.string());
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) throw DataError("cannot read corpus file " + f.string());
    corpus.append(tokenize(text.str()));
  }
  if (files_read) *files_read = files;
  return corpus;
}

}  // namespace affectgate::nlg
