#include "affectgate/rationality/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "affectgate/core/error.hpp"

namespace affectgate::rationality {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line, const char* what) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  return value;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<game::ChoiceEvent> read_choice_csv(std::istream& in) {
  std::vector<game::ChoiceEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("round", 0) == 0) continue;
    const auto f = split_csv(line);
    if (f.size() < 5) throw ParseError(line_no, "expected at least 5 fields");
    const auto round = parse_number<std::uint64_t>(f[0], line_no, "round");
    const auto n = parse_number<std::size_t>(f[1], line_no, "gate_count");
    if (f.size() != 5 + 3 * n)
      throw ParseError(line_no, "expected " + std::to_string(5 + 3 * n) + " fields for " +
                                    std::to_string(n) + " gates, got " + std::to_string(f.size()));
    const auto chosen = parse_number<std::size_t>(f[2], line_no, "chosen");
    bool defended = false;
    if (f[3] == "1" || f[3] == "true")
      defended = true;
    else if (f[3] != "0" && f[3] != "false")
      throw ParseError(line_no, "bad defended '" + f[3] + "'");
    game::Affect affect;
    try {
      affect = game::parse_affect(f[4]);
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
    std::vector<game::GateSpec> gates;
    try {
      for (std::size_t j = 0; j < n; ++j)
        gates.emplace_back(parse_number<int>(f[5 + j], line_no, "reward"),
                           parse_number<int>(f[5 + n + j], line_no, "penalty"),
                           parse_number<double>(f[5 + 2 * n + j], line_no, "coverage"));
      game::RoundSpec board(std::move(gates));
      if (chosen >= n) throw ParseError(line_no, "chosen gate " + std::to_string(chosen) + " out of range");
      const auto& g = board[chosen];
      events.push_back(game::ChoiceEvent{
          .round_index = round,
          .round = std::move(board),
          .chosen_gate = chosen,
          .defended = defended,
          .payoff = static_cast<double>(defended ? g.penalty() : g.reward()),
          .affect = affect,
          .timestamp = {},
      });
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return events;
}

void write_choice_csv(std::ostream& out, std::span<const game::ChoiceEvent> events) {
  std::size_t max_n = 0;
  for (const auto& e : events) max_n = std::max(max_n, e.round.size());
  out << "round,gate_count,chosen,defended,affect";
  for (const char* prefix : {"R", "P", "p"})
    for (std::size_t j = 1; j <= max_n; ++j) out << ',' << prefix << j;
  out << '\n';
  for (const auto& e : events) {
    out << e.round_index << ',' << e.round.size() << ',' << e.chosen_gate << ','
        << (e.defended ? 1 : 0) << ',' << game::to_string(e.affect);
    for (const auto& g : e.round.gates()) out << ',' << g.reward();
    for (const auto& g : e.round.gates()) out << ',' << g.penalty();
    for (const auto& g : e.round.gates()) out << ',' << format_double(g.coverage());
    out << '\n';
  }
}

nlohmann::json fit_report_json(const RationalityFit& fit, std::span<const CumulativePoint> series) {
  auto s = nlohmann::json::array();
  for (const auto& p : series) s.push_back({p.round_index, p.lambda_hat});
  return {
      {"lambda_hat", fit.lambda_hat},
      {"log_likelihood", fit.log_likelihood},
      {"at_upper_bound", fit.at_upper_bound},
      {"rounds_used", fit.rounds_used},
      {"series", std::move(s)},
  };
}

nlohmann::json epqr_report_json(const EpqrFit& fit, FeatureVariant variant) {
  const auto names = feature_names(variant);
  auto unidentifiable = nlohmann::json::array();
  for (auto k : fit.unidentifiable_dims) unidentifiable.push_back(names.at(k));
  return {
      {"variant", to_string(variant)},
      {"features", names},
      {"weights", fit.weights},
      {"log_likelihood", fit.log_likelihood},
      {"gradient_norm", fit.gradient_norm},
      {"iterations", fit.iterations},
      {"unidentifiable_dims", fit.unidentifiable_dims},
      {"unidentifiable_features", std::move(unidentifiable)},
  };
}

void write_series_csv(std::ostream& out, std::span<const CumulativePoint> series) {
  out << "round,lambda_hat\n";
  for (const auto& p : series) out << p.round_index << ',' << format_double(p.lambda_hat) << '\n';
}

}  // namespace affectgate::rationality
