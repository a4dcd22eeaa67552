#pragma once

#include <filesystem>
#include <vector>

#include "affectgate/nlg/tokenize.hpp"

namespace affectgate::nlg {

// Tokenizes every *.txt file directly inside `dir`, in filename order.
// Throws DataError("no corpus files") when there are none, and names any
// file that cannot be read.
TokenizedCorpus load_corpus_dir(const std::filesystem::path& dir,
                                std::vector<std::filesystem::path>* files_read = nullptr);

}  // namespace affectgate::nlg
