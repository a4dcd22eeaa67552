// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "affectgate/core/random.hpp"
#include "affectgate/game/rounds_io.hpp"
#include "affectgate/game/simulate.hpp"
#include "affectgate/nlg/corpus.hpp"
#include "affectgate/nlg/lexicon.hpp"
#include "affectgate/nlg/predictor.hpp"
#include "affectgate/nlg/templates.hpp"
#include "affectgate/nlg/wordlists.hpp"
#include "affectgate/rationality/dataset.hpp"
#include "affectgate/rationality/epqr.hpp"
#include "affectgate/rationality/lambda_fit.hpp"
#include "affectgate/rationality/quantal.hpp"
#include "affectgate/session/event_log.hpp"
#include "commands.hpp"
#include "oracles.hpp"

using namespace affectgate;
using namespace affectgate::rationality;
namespace fs = std::filesystem;

namespace {

const fs::path kData = AFFECTGATE_DATA_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;
};

const std::vector<game::RoundSpec>& bundled_rounds() {
  static const auto rounds = game::load_rounds_file(kData / "rounds" / "default_35.ndjson");
  return rounds;
}

std::vector<game::ChoiceEvent> simulate(double lambda, std::size_t count, std::uint64_t seed,
                                        game::Affect affect = game::Affect::none) {
  Rng rng(seed);
  auto events = game::simulate_player(lambda, game::cycle_rounds(bundled_rounds(), count), rng);
  for (auto& e : events) e.affect = affect;
  return events;
}

// Random boards for property checks: 2..10 gates, unrestricted coverage.
game::RoundSpec random_board(Rng& rng) {
  std::vector<game::GateSpec> gates;
  const auto n = 2 + rng.index(9);
  for (std::size_t j = 0; j < n; ++j)
    gates.emplace_back(static_cast<int>(rng.index(11)), -static_cast<int>(rng.index(11)), rng.uniform01());
  return game::RoundSpec(std::move(gates));
}

std::vector<game::ChoiceEvent> random_events(Rng& rng, std::size_t count, game::Affect affect) {
  std::vector<game::RoundSpec> boards;
  for (std::size_t i = 0; i < count; ++i) boards.push_back(random_board(rng));
  Rng player(rng.next());
  auto events = game::simulate_player(2.0 * rng.uniform01(), boards, player);
  for (auto& e : events) e.affect = affect;
  return events;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict lambda_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  std::uint64_t seed = 1000;
  for (double target : {0.0, 0.25, 0.5, 1.0}) {
    const double tol = std::max(0.05, 0.1 * target);
    int good = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const ChoiceDataset data(simulate(target, 1000, seed++));
      if (std::abs(estimate_lambda(data).lambda_hat - target) <= tol) ++good;
    }
    v.pass = v.pass && good >= 19;
    v.detail += fmt("lambda*=%.2f: %g/20; ", target, good);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.pass = v.pass && secs < 30.0;
  v.detail += fmt("%.2f s", secs);
  return v;
}

Verdict quantal_exactness() {
  Verdict v;
  const auto q = quantal_probs(std::log(3.0), std::vector{1.0, 0.0});
  const double example_err = std::max(std::abs(q[0] - 0.75), std::abs(q[1] - 0.25));
  bool uniform = true;
  Rng rng(7);
  double worst_sum = 0.0, worst_shift = 0.0, worst_oracle = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const auto n = 2 + rng.index(15);
    std::vector<double> u(n);
    for (double& x : u) x = -20.0 + 40.0 * rng.uniform01();
    const double lambda = 5.0 * rng.uniform01();
    const auto p = quantal_probs(lambda, u);
    double sum = 0.0;
    for (double x : p) sum += x;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    auto shifted = u;
    const double c = -50.0 + 100.0 * rng.uniform01();
    for (double& x : shifted) x += c;
    const auto ps = quantal_probs(lambda, shifted);
    const auto naive = oracle::naive_softmax(lambda, u);
    for (std::size_t j = 0; j < n; ++j) {
      worst_shift = std::max(worst_shift, std::abs(p[j] - ps[j]));
      worst_oracle = std::max(worst_oracle, std::abs(p[j] - naive[j]));
    }
    for (double x : quantal_probs(0.0, u)) uniform = uniform && x == 1.0 / static_cast<double>(n);
  }
  v.pass = example_err <= 1e-12 && uniform && worst_sum <= 1e-9 && worst_shift <= 1e-12 && worst_oracle <= 1e-12;
  v.detail = fmt("ln3 example err %.1e; sum err %.1e; shift err %.1e", example_err, worst_sum, worst_shift) +
             (uniform ? "; lambda=0 exactly uniform" : "; lambda=0 NOT uniform");
  return v;
}

Verdict concavity_and_gradient() {
  Verdict v;
  Rng rng(21);
  double worst_second = -INFINITY;
  for (int t = 0; t < 50; ++t) {
    const ChoiceDataset data(random_events(rng, 5 + rng.index(40), game::Affect::none));
    const double h = 1e-3;
    for (double lambda = h; lambda <= 5.0; lambda += 0.05) {
      const double d2 = log_likelihood(lambda + h, data) - 2.0 * log_likelihood(lambda, data) +
                        log_likelihood(lambda - h, data);
      worst_second = std::max(worst_second, d2);
    }
  }
  double worst_rel = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto variant = static_cast<FeatureVariant>(t % 4);
    const auto affect = t % 3 == 0 ? game::Affect::negative : game::Affect::positive;
    const ChoiceDataset data(random_events(rng, 3 + rng.index(10), affect));
    const EpqrDesign design(data, variant);
    std::vector<double> w(design.dimension());
    for (double& x : w) x = -1.0 + 2.0 * rng.uniform01();
    const auto g = epqr_gradient(w, design);
    const auto fd = oracle::finite_difference_gradient(
        [&](const std::vector<double>& x) { return epqr_log_likelihood(x, design); }, w);
    for (std::size_t k = 0; k < g.size(); ++k)
      worst_rel = std::max(worst_rel, std::abs(g[k] - fd[k]) / std::max(1.0, std::abs(fd[k])));
  }
  v.pass = worst_second <= 1e-9 && worst_rel <= 1e-5;
  v.detail = fmt("max second difference %.2e; worst gradient rel err %.2e", worst_second, worst_rel);
  return v;
}

// The lambda fit is constrained to [0, lambda_max] while EPQR weights are
// free, so the two coincide when the lambda optimum is interior. A fit at
// lambda_hat = 0 must correspond to an unconstrained optimum w <= 0.
Verdict epqr_reduction() {
  Verdict v;
  double worst = 0.0;
  int interior = 0, boundary = 0;
  bool boundary_ok = true;
  for (int t = 0; t < 12; ++t) {
    const ChoiceDataset data(simulate(0.1 * t, 500, 300 + t));
    const auto fit = estimate_lambda(data);
    const auto w = estimate_epqr(data, FeatureVariant::utility_only).weights.at(0);
    if (fit.lambda_hat > 0.0 && !fit.at_upper_bound) {
      ++interior;
      worst = std::max(worst, std::abs(w - fit.lambda_hat));
    } else {
      ++boundary;
      boundary_ok = boundary_ok && fit.lambda_hat == 0.0 && w <= 0.0;
    }
  }
  v.pass = interior >= 10 && worst <= 1e-6 && boundary_ok;
  v.detail = fmt("max |w - lambda_hat| %.2e over %g interior fits", worst, interior) +
             fmt("; %g boundary fits with w <= 0", boundary);
  return v;
}

Verdict identifiability() {
  Verdict v;
  double worst = 0.0;
  bool flagged = true;
  Rng rng(5);
  for (auto affect : {game::Affect::negative, game::Affect::positive}) {
    for (int t = 0; t < 5; ++t) {
      const ChoiceDataset data(simulate(0.3 + 0.2 * t, 200, 400 + t, affect));
      const EpqrDesign design(data, FeatureVariant::reward_penalty_emotion);
      std::vector<double> w{rng.uniform01() - 0.5, rng.uniform01() - 0.5, rng.uniform01() - 0.5};
      worst = std::max(worst, std::abs(epqr_gradient(w, design)[2]));
      const auto fit = estimate_epqr(data, FeatureVariant::reward_penalty_emotion);
      flagged = flagged && fit.unidentifiable_dims == std::vector<std::size_t>{2} && fit.weights[2] == 0.0;
    }
  }
  // Each round contributes E * (1 - sum q), a few ulps at most.
  v.pass = worst <= 200 * 8 * std::numeric_limits<double>::epsilon() && flagged;
  v.detail = fmt("max |dL/dw_E| %.1e over 10 single-condition logs", worst) + (flagged ? "; E flagged" : "; NOT flagged");
  return v;
}

struct SampleModels {
  nlg::TokenizedCorpus corpus;
  nlg::BidirectionalModel models;
};

const SampleModels& sample() {
  static const SampleModels s = [] {
    auto corpus = nlg::load_corpus_dir(kData / "corpus" / "sotu_sample");
    auto models = nlg::BidirectionalModel::train(corpus);
    return SampleModels{std::move(corpus), std::move(models)};
  }();
  return s;
}

Verdict ngram_normalization() {
  Verdict v;
  const auto& m = sample().models;
  Rng rng(33);
  double worst = 0.0;
  int contexts = 0;
  for (const auto* model : {&m.forward_trigram, &m.reverse_trigram, &m.forward_bigram, &m.reverse_bigram}) {
    std::vector<const nlg::Context*> observed;
    for (const auto& [ctx, words] : model->continuations()) observed.push_back(&ctx);
    for (int t = 0; t < 100; ++t) {
      nlg::Context ctx = *observed[rng.index(observed.size())];
      if (t % 10 == 9) ctx.back() = "qqqunseen";
      double sum = 0.0;
      for (const auto& w : model->vocabulary()) sum += nlg::ngram_prob(*model, ctx, w);
      worst = std::max(worst, std::abs(sum - 1.0));
      ++contexts;
    }
  }
  nlg::TokenizedCorpus toy;
  toy.sentences = {{"a", "b", "a", "b"}};
  toy.vocabulary = {"a", "b"};
  const auto bigram = nlg::NgramModel::train(toy, 2, nlg::Direction::forward);
  const double pba = nlg::ngram_prob(bigram, nlg::Context{"a"}, "b");
  v.pass = worst <= 1e-9 && pba == 0.75;
  v.detail = fmt("%g contexts on D=%g, max |sum - 1| %.1e", contexts, static_cast<double>(m.vocabulary().size()), worst) +
             fmt("; toy P(b|a) = %.17g", pba);
  return v;
}

Verdict duality() {
  Verdict v;
  const auto& s = sample();
  nlg::TokenizedCorpus reversed = s.corpus;
  for (auto& sentence : reversed.sentences) std::reverse(sentence.begin(), sentence.end());
  std::size_t checked = 0, mismatches = 0;
  for (int order : {2, 3}) {
    const auto& rev = order == 2 ? s.models.reverse_bigram : s.models.reverse_trigram;
    const auto fwd = nlg::NgramModel::train(reversed, order, nlg::Direction::forward, rev.shared_vocabulary());
    if (rev.continuations() != fwd.continuations()) ++mismatches;
    for (const auto& [ctx, words] : rev.continuations()) {
      for (const auto& [w, n] : words) {
        ++checked;
        if (nlg::ngram_prob(rev, ctx, w) != nlg::ngram_prob(fwd, ctx, w)) ++mismatches;
      }
      const auto& unseen = *rev.vocabulary().begin();
      if (!words.contains(unseen)) {
        ++checked;
        if (nlg::ngram_prob(rev, ctx, unseen) != nlg::ngram_prob(fwd, ctx, unseen)) ++mismatches;
      }
    }
  }
  v.pass = mismatches == 0;
  v.detail = fmt("%g probabilities over all observed contexts, %g mismatches", static_cast<double>(checked),
                 static_cast<double>(mismatches));
  return v;
}

Verdict affect_soundness() {
  Verdict v;
  const auto& s = sample();
  const auto lexicon = nlg::load_afinn_file(kData / "lexicon" / "AFINN-111.txt");
  const auto blocklist = nlg::load_word_list_file(kData / "blocklist.txt");
  const auto stems = nlg::load_templates_file(kData / "templates" / "reference_stems.json");
  int sound_pairs = 0;
  bool disjoint = true;
  std::string words;
  for (const auto& stem : stems) {
    std::set<std::string> by_affect[2];
    for (auto affect : {game::Affect::negative, game::Affect::positive}) {
      const auto preds = nlg::predict_blank(stem, affect, s.models, lexicon, nlg::default_stopwords(), blocklist);
      bool sound = !preds.empty();
      for (const auto& p : preds) {
        const int val = lexicon.valence(p.word).value_or(0);
        sound = sound && (affect == game::Affect::positive ? val > 0 : val < 0);
        by_affect[static_cast<int>(affect)].insert(p.word);
      }
      if (sound) ++sound_pairs;
      if (!preds.empty() && &stem == &stems.front()) words += std::string(to_string(affect)) + " '" + preds[0].word + "' ";
    }
    for (const auto& w : by_affect[0]) disjoint = disjoint && !by_affect[1].contains(w);
  }
  v.pass = stems.size() == 5 && sound_pairs == 10 && disjoint;
  v.detail = fmt("%g/10 stem-condition pairs sign-correct", sound_pairs) + (disjoint ? ", disjoint sets" : ", OVERLAP") +
             "; first stem: " + words;
  return v;
}

Verdict cumulative_series() {
  Verdict v;
  const ChoiceDataset data(simulate(0.4, 35, 77));
  const auto series = cumulative_lambda(data);
  bool prefix = series.size() == 35;
  for (std::size_t r = 0; prefix && r < series.size(); ++r)
    prefix = series[r].round_index == r && series[r].lambda_hat == estimate_lambda(data.head(r + 1)).lambda_hat;
  for (std::size_t k = 1; prefix && k <= 35; k += 7) {
    const auto shorter = cumulative_lambda(data.head(k));
    prefix = std::equal(shorter.begin(), shorter.end(), series.begin());
  }
  prefix = prefix && cumulative_lambda(data, {}, 4) == series;
  v.pass = prefix;
  v.detail = fmt("%g entries, final lambda_hat %.6f", static_cast<double>(series.size()), series.back().lambda_hat);
  return v;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "affectgate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

Verdict end_to_end() {
  Verdict v;
  const auto dir = fs::temp_directory_path() / "affectgate_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto log = (dir / "sim.ndjson").string();
  const auto rounds = (kData / "rounds" / "default_35.ndjson").string();
  bool ok = run_cli({"simulate", "--lambda", "0.5", "--rounds", rounds, "--seed", "2024", "--count", "1000",
                     "--affect", "positive", "--out", log}) == 0;

  // Service import: parse with the session log reader and re-export.
  const auto records = session::read_event_log_file(log);
  const auto exported = (dir / "exported.ndjson").string();
  {
    std::ofstream out(exported, std::ios::binary);
    for (const auto& r : records) out << session::format_record(r) << '\n';
  }
  std::ifstream a(log, std::ios::binary), b(exported, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  const bool bytes_equal = sa.str() == sb.str();

  std::string report_a, report_b;
  ok = ok && run_cli({"fit", "--log", log}, &report_a) == 0 && run_cli({"fit", "--log", exported}, &report_b) == 0;
  const double direct = estimate_lambda(ChoiceDataset(simulate(0.5, 1000, 2024, game::Affect::positive))).lambda_hat;
  const double via_cli = ok ? nlohmann::json::parse(report_a).at("lambda_hat").get<double>() : NAN;
  v.pass = ok && bytes_equal && report_a == report_b && via_cli == direct;
  v.detail = fmt("lambda_hat %.17g via cli, %.17g in memory", via_cli, direct) +
             (bytes_equal ? "; re-exported log byte-identical" : "; re-export DIFFERS") +
             (report_a == report_b ? "; reports identical" : "; reports DIFFER");
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"lambda recovery (19/20 replications per lambda*, < 30 s)", lambda_recovery},
      {"quantal response exactness", quantal_exactness},
      {"log-likelihood concavity and EPQR gradient", concavity_and_gradient},
      {"EPQR utility_only reduces to the lambda fit", epqr_reduction},
      {"EPQR identifiability diagnostic", identifiability},
      {"n-gram normalization and toy P(b|a)", ngram_normalization},
      {"bidirectional duality", duality},
      {"affect soundness on the five reference stems", affect_soundness},
      {"cumulative series prefix property", cumulative_series},
      {"end-to-end simulate -> import -> fit", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
