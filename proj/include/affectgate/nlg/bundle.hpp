#pragma once

#include <filesystem>
#include <iosfwd>

#include "affectgate/nlg/predictor.hpp"

namespace affectgate::nlg {

inline constexpr int kBundleVersion = 1;

// JSON container for the four models plus their shared vocabulary:
//   {"format": "affectgate-ngram-bundle", "version": 1,
//    "vocabulary": [...sorted words...],
//    "models": [{"order": 3, "direction": "forward",
//                "contexts": [[[i, j], [w, count, w, count, ...]], ...]}, ...]}
// Words are referenced by vocabulary index, the boundary marker by -1.
// Output is deterministic for a given model.
void save_bundle(std::ostream& out, const BidirectionalModel& models);
void save_bundle_file(const std::filesystem::path& path, const BidirectionalModel& models);

// Throws DataError for a missing/mismatched format or version, or any
// structural problem.
BidirectionalModel load_bundle(std::istream& in);
BidirectionalModel load_bundle_file(const std::filesystem::path& path);

}  // namespace affectgate::nlg
