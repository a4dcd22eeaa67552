#include "commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "affectgate/core/error.hpp"
#include "affectgate/core/random.hpp"
#include "affectgate/game/rounds_io.hpp"
#include "affectgate/game/simulate.hpp"
#include "affectgate/nlg/bundle.hpp"
#include "affectgate/nlg/corpus.hpp"
#include "affectgate/nlg/lexicon.hpp"
#include "affectgate/nlg/templates.hpp"
#include "affectgate/nlg/utterance.hpp"
#include "affectgate/nlg/wordlists.hpp"
#include "affectgate/rationality/dataset.hpp"
#include "affectgate/rationality/epqr.hpp"
#include "affectgate/rationality/io.hpp"
#include "affectgate/rationality/lambda_fit.hpp"
#include "affectgate/session/event_log.hpp"

namespace affectgate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path);
  write(file);
  if (!file) throw DataError("write failed for " + path);
}

fs::path or_default(const std::optional<fs::path>& p, const fs::path& fallback) { return p ? *p : fallback; }

nlg::WordSet optional_word_list(const std::optional<fs::path>& path, const fs::path& fallback, bool use_default_stopwords) {
  const auto p = or_default(path, fallback);
  if (!path && !fs::exists(p)) return use_default_stopwords ? nlg::default_stopwords() : nlg::WordSet{};
  return nlg::load_word_list_file(p);
}

std::vector<game::ChoiceEvent> read_choices(const std::string& path, const std::string& phase) {
  if (path.ends_with(".csv")) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
      return rationality::read_choice_csv(in);
    } catch (const ParseError& e) {
      throw ParseError(e.line(), path + ": " + e.message());
    }
  }
  const auto records = session::read_event_log_file(path);
  std::optional<session::Phase> filter;
  if (phase != "all") filter = session::parse_phase(phase);
  auto events = session::choice_events(records, filter);
  if (events.empty()) throw DataError(path + ": no " + phase + " choice events");
  return events;
}

struct TrainArgs {
  std::string corpus, out;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  const auto corpus = nlg::load_corpus_dir(a.corpus, &files);
  const auto models = nlg::BidirectionalModel::train(corpus);
  emit(a.out, out, [&](std::ostream& o) { nlg::save_bundle(o, models); });
  err << "files " << files.size() << ", sentences " << corpus.sentences.size() << ", vocabulary D = "
      << models.vocabulary().size() << '\n';
  return kOk;
}

struct GenerateArgs {
  std::string bundle, templates, lexicon, stopwords, blocklist, affect, out;
  std::size_t k = 2;
  std::size_t count = 0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const auto affect = game::parse_affect(a.affect);
  if (affect == game::Affect::none) throw std::invalid_argument("--affect must be positive or negative");
  const auto models = nlg::load_bundle_file(a.bundle);
  const auto templates = nlg::load_templates_file(a.templates);
  const auto lexicon = nlg::load_afinn_file(a.lexicon);
  const auto stopwords = a.stopwords.empty() ? nlg::default_stopwords() : nlg::load_word_list_file(a.stopwords);
  const auto blocklist = a.blocklist.empty() ? nlg::WordSet{} : nlg::load_word_list_file(a.blocklist);
  const auto pool = nlg::build_utterance_pool(templates, affect, models, lexicon, stopwords, blocklist,
                                              {.top_k = a.k, .max_entries = a.count});
  for (const auto& t : pool.unfilled) err << "warning: no candidates survive for template: " << t << '\n';
  emit(a.out, out, [&](std::ostream& o) { o << nlg::pool_to_json(pool).dump(2) << '\n'; });
  return kOk;
}

struct SimulateArgs {
  double lambda = 0.0;
  std::string rounds, affect = "none", start = "2020-01-01T00:00:00Z", out;
  std::uint64_t seed = 0;
  std::size_t count = 35;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  if (!(a.lambda >= 0.0)) throw std::invalid_argument("--lambda must be >= 0");
  const auto affect = game::parse_affect(a.affect);
  const auto boards = game::cycle_rounds(game::load_rounds_file(a.rounds), a.count);
  Rng rng(a.seed);
  auto events = game::simulate_player(a.lambda, boards, rng, {parse_iso8601(a.start)});
  for (auto& e : events) e.affect = affect;
  const auto phase = affect == game::Affect::none ? session::Phase::practice : session::Phase::main;
  emit(a.out, out, [&](std::ostream& o) { session::write_choice_log(o, events, phase); });
  return kOk;
}

struct FitArgs {
  std::string log, mode = "lambda", variant = "base", phase = "all", series, out, optimizer = "newton";
  bool standardize = false;
  unsigned threads = 1;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const rationality::ChoiceDataset data(read_choices(a.log, a.phase));
  json report;
  if (a.mode == "lambda") {
    const auto fit = rationality::estimate_lambda(data);
    const auto series = rationality::cumulative_lambda(data, {}, a.threads);
    report = rationality::fit_report_json(fit, series);
    if (fit.at_upper_bound) err << "warning: lambda_hat is at the search upper bound\n";
    if (!a.series.empty())
      emit(a.series, out, [&](std::ostream& o) { rationality::write_series_csv(o, series); });
  } else if (a.mode == "epqr") {
    if (!a.series.empty()) throw std::invalid_argument("--series applies to --mode lambda");
    const auto variant = rationality::parse_feature_variant(a.variant);
    rationality::EpqrOptions options;
    options.standardize = a.standardize;
    options.method = a.optimizer == "gradient" ? rationality::EpqrMethod::gradient : rationality::EpqrMethod::newton;
    rationality::EpqrFit fit;
    try {
      fit = rationality::estimate_epqr(data, variant, options);
    } catch (const rationality::EpqrConvergenceError& e) {
      err << "warning: " << e.what() << "; reporting the best iterate\n";
      fit = e.best();
    }
    const auto names = rationality::feature_names(variant);
    for (auto d : fit.unidentifiable_dims)
      err << "warning: feature " << names[d]
          << " is constant across the gates of every round and cannot be identified; held at 0\n";
    report = rationality::epqr_report_json(fit, variant);
  } else {
    throw std::invalid_argument("--mode must be lambda or epqr");
  }
  emit(a.out, out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
  return kOk;
}

struct MakeRoundsArgs {
  std::uint64_t seed = 2018;
  std::size_t count = 35;
  std::size_t gates = game::kDefaultGateCount;
  std::string out;
};

int cmd_make_rounds(const MakeRoundsArgs& a, std::ostream& out, std::ostream&) {
  const auto rounds = game::generate_rounds(a.seed, a.count, a.gates);
  emit(a.out, out, [&](std::ostream& o) { game::write_rounds(o, rounds); });
  return kOk;
}

std::map<game::Affect, std::vector<std::string>> load_pools(const ServeOptions& o, std::ostream& log) {
  std::map<game::Affect, std::vector<std::string>> pools;
  if (o.positive_pool && o.negative_pool) {
    for (const auto& [affect, path] : {std::pair{game::Affect::positive, *o.positive_pool},
                                       std::pair{game::Affect::negative, *o.negative_pool}}) {
      std::ifstream in(path);
      if (!in) throw DataError("cannot open utterance pool " + path.string());
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
      }
      auto pool = nlg::pool_from_json(j);
      if (pool.affect != affect) throw DataError(path.string() + ": pool is not " + std::string(to_string(affect)));
      pools[affect] = pool.sentences();
    }
    return pools;
  }
  if (!o.bundle) throw DataError("serve needs --bundle or both --positive-pool and --negative-pool");
  const auto models = nlg::load_bundle_file(*o.bundle);
  const auto templates = nlg::load_templates_file(or_default(o.templates, o.data_dir / "templates" / "session_stems.json"));
  const auto lexicon = nlg::load_afinn_file(or_default(o.lexicon, o.data_dir / "lexicon" / "AFINN-111.txt"));
  const auto stopwords = optional_word_list(o.stopwords, o.data_dir / "stopwords_en.txt", true);
  const auto blocklist = optional_word_list(o.blocklist, o.data_dir / "blocklist.txt", false);
  for (auto affect : {game::Affect::positive, game::Affect::negative}) {
    const auto pool = nlg::build_utterance_pool(templates, affect, models, lexicon, stopwords, blocklist);
    for (const auto& t : pool.unfilled) log << "warning: no " << to_string(affect) << " fill for: " << t << '\n';
    if (pool.entries.empty()) throw DataError("no " + std::string(to_string(affect)) + " utterances could be built");
    pools[affect] = pool.sentences();
    log << to_string(affect) << " pool: " << pool.entries.size() << " sentences\n";
  }
  return pools;
}

int cmd_serve(const ServeOptions& o, std::ostream& out) {
  // Block the shutdown signals in every thread so they can be awaited here.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto service = start_service(o, out);
  out << "listening on " << o.address << ':' << service.server->port() << std::endl;
  int signal = 0;
  sigwait(&signals, &signal);
  out << "received " << (signal == SIGINT ? "SIGINT" : "SIGTERM") << ", shutting down" << std::endl;
  service.server->stop();
  service.manager->wait_for_fits();
  service.server.reset();
  service.manager.reset();
  out << "stopped" << std::endl;
  return kOk;
}

}  // namespace

Service start_service(const ServeOptions& o, std::ostream& log) {
  session::ManagerOptions m;
  m.rounds_dir = or_default(o.rounds_dir, o.data_dir / "rounds");
  if (!fs::is_directory(m.rounds_dir)) throw DataError("rounds directory " + m.rounds_dir.string() + " not found");
  m.log_dir = o.log_dir;
  m.utterances = load_pools(o, log);

  Service s;
  s.manager = std::make_unique<session::SessionManager>(std::move(m));
  const auto restored = s.manager->recover();
  log << "rounds dir " << or_default(o.rounds_dir, o.data_dir / "rounds").string() << ", session logs "
      << (o.log_dir ? o.log_dir->string() : std::string("in memory")) << ", restored " << restored << " sessions\n";
  s.server = std::make_unique<session::Server>(
      *s.manager, session::ServerOptions{.address = o.address, .port = o.port, .io_threads = 1, .worker_threads = o.threads, .log = nullptr});
  try {
    s.server->start();
  } catch (const std::system_error& e) {
    throw DataError("cannot listen on " + o.address + ":" + std::to_string(o.port) + ": " + e.what());
  }
  return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gate game experiment toolkit: language models, synthetic players, rationality fits and the session server."};
  app.name("affectgate");
  app.require_subcommand(1);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train the four n-gram models on a directory of .txt files");
  c_train->add_option("--corpus", train.corpus, "Corpus directory")->required();
  c_train->add_option("--out", train.out, "Bundle file (default stdout)");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Fill sentence templates for one affect condition");
  c_gen->add_option("--bundle", gen.bundle, "Model bundle")->required();
  c_gen->add_option("--templates", gen.templates, "Templates JSON")->required();
  c_gen->add_option("--lexicon", gen.lexicon, "AFINN-format lexicon")->required();
  c_gen->add_option("--affect", gen.affect, "positive or negative")->required();
  c_gen->add_option("--stopwords", gen.stopwords, "Stop-word list (default built in)");
  c_gen->add_option("--blocklist", gen.blocklist, "Words never used as fills");
  c_gen->add_option("-k,--top-k", gen.k, "Ranked candidates kept per template")->check(CLI::PositiveNumber);
  c_gen->add_option("--count", gen.count, "Keep at most this many sentences (0 = all)");
  c_gen->add_option("--out", gen.out, "Pool JSON (default stdout)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a quantal-response player");
  c_sim->add_option("--lambda", sim.lambda, "Rationality parameter")->required();
  c_sim->add_option("--rounds", sim.rounds, "Rounds file, cycled")->required();
  c_sim->add_option("--seed", sim.seed, "Random seed")->required();
  c_sim->add_option("--count", sim.count, "Number of choices")->check(CLI::PositiveNumber);
  c_sim->add_option("--affect", sim.affect, "Affect recorded on the events (none logs a practice phase)");
  c_sim->add_option("--start", sim.start, "Timestamp of the first event");
  c_sim->add_option("--out", sim.out, "Event log (default stdout)");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit lambda or EPQR weights to a choice log");
  c_fit->add_option("--log", fit.log, "Event log (.ndjson) or choice CSV (.csv)")->required();
  c_fit->add_option("--mode", fit.mode, "lambda or epqr")->check(CLI::IsMember({"lambda", "epqr"}));
  c_fit->add_option("--variant", fit.variant, "EPQR features: base, two_indicator, utility_only, interaction");
  c_fit->add_option("--phase", fit.phase, "practice, main or all")->check(CLI::IsMember({"practice", "main", "all"}));
  c_fit->add_option("--series", fit.series, "Cumulative lambda series CSV");
  c_fit->add_option("--optimizer", fit.optimizer, "EPQR ascent direction")->check(CLI::IsMember({"newton", "gradient"}));
  c_fit->add_flag("--standardize", fit.standardize, "Rescale EPQR features while optimizing");
  c_fit->add_option("--threads", fit.threads, "Threads for the cumulative series")->check(CLI::PositiveNumber);
  c_fit->add_option("--out", fit.out, "Report JSON (default stdout)");

  MakeRoundsArgs mk;
  auto* c_mk = app.add_subcommand("make-rounds", "Generate a seeded rounds file");
  c_mk->add_option("--seed", mk.seed, "Random seed");
  c_mk->add_option("--count", mk.count, "Rounds")->check(CLI::PositiveNumber);
  c_mk->add_option("--gates", mk.gates, "Gates per round")->check(CLI::Range(2, 64));
  c_mk->add_option("--out", mk.out, "Rounds file (default stdout)");

  ServeOptions serve;
  std::string data_dir = "data";
  const auto path_opt = [](CLI::App* c, const char* name, std::optional<fs::path>& target, const char* help) {
    c->add_option_function<std::string>(name, [&target](const std::string& v) { target = v; }, help);
  };
  auto* c_serve = app.add_subcommand("serve", "Run the session server until SIGINT/SIGTERM");
  c_serve->add_option("--data", data_dir, "Data directory for default inputs");
  path_opt(c_serve, "--bundle", serve.bundle, "Model bundle");
  path_opt(c_serve, "--positive-pool", serve.positive_pool, "Positive pool from generate");
  path_opt(c_serve, "--negative-pool", serve.negative_pool, "Negative pool from generate");
  path_opt(c_serve, "--templates", serve.templates, "Templates JSON");
  path_opt(c_serve, "--lexicon", serve.lexicon, "AFINN-format lexicon");
  path_opt(c_serve, "--stopwords", serve.stopwords, "Stop-word list");
  path_opt(c_serve, "--blocklist", serve.blocklist, "Fill blocklist");
  path_opt(c_serve, "--rounds", serve.rounds_dir, "Directory of rounds files");
  path_opt(c_serve, "--log-dir", serve.log_dir, "Directory for session logs (default in memory)");
  c_serve->add_option("--address", serve.address, "Listen address");
  c_serve->add_option("--port", serve.port, "Listen port (0 = ephemeral)");
  c_serve->add_option("--threads", serve.threads, "Request worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  serve.data_dir = data_dir;

  try {
    if (c_train->parsed()) return cmd_train(train, out, err);
    if (c_gen->parsed()) return cmd_generate(gen, out, err);
    if (c_sim->parsed()) return cmd_simulate(sim, out, err);
    if (c_fit->parsed()) return cmd_fit(fit, out, err);
    if (c_mk->parsed()) return cmd_make_rounds(mk, out, err);
    if (c_serve->parsed()) return cmd_serve(serve, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace affectgate::cli
