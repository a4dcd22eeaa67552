#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "affectgate/game/choice.hpp"
#include "affectgate/rationality/epqr.hpp"
#include "affectgate/rationality/lambda_fit.hpp"

namespace affectgate::rationality {

// Flat CSV for offline analysis, one choice per row:
//   round,gate_count,chosen,defended,affect,R1..RN,P1..PN,p1..pN
// `chosen` is the 0-based gate index, `defended` is 0/1 and `affect` is
// negative|positive|none. An optional header row starting with "round" is
// skipped. Payoff is derived from the chosen gate. Throws ParseError.
std::vector<game::ChoiceEvent> read_choice_csv(std::istream& in);
void write_choice_csv(std::ostream& out, std::span<const game::ChoiceEvent> events);

// {"lambda_hat", "log_likelihood", "at_upper_bound", "rounds_used",
//  "series": [[round, lambda], ...]}
nlohmann::json fit_report_json(const RationalityFit& fit, std::span<const CumulativePoint> series);
nlohmann::json epqr_report_json(const EpqrFit& fit, FeatureVariant variant);

// "round,lambda_hat" header plus one row per point.
void write_series_csv(std::ostream& out, std::span<const CumulativePoint> series);

}  // namespace affectgate::rationality
