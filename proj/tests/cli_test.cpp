#include <doctest.h>

#include <array>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "affectgate/core/error.hpp"
#include "affectgate/session/event_log.hpp"
#include "commands.hpp"

using namespace affectgate;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = AFFECTGATE_DATA_DIR;
const fs::path kBinary = AFFECTGATE_CLI_PATH;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "affectgate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("affectgate_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const std::string kRounds = (kData / "rounds" / "default_35.ndjson").string();

// Sample-corpus bundle, trained once.
const std::string& sample_bundle() {
  static const std::string path = [] {
    const auto p = (scratch() / "sample.bundle.json").string();
    REQUIRE(invoke({"train", "--corpus", (kData / "corpus" / "sotu_sample").string(), "--out", p}).code == 0);
    return p;
  }();
  return path;
}

json generate(const std::string& affect, const std::string& extra_k = "2") {
  const auto r = invoke({"generate", "--bundle", sample_bundle(), "--templates",
                      (kData / "templates" / "reference_stems.json").string(), "--lexicon",
                      (kData / "lexicon" / "AFINN-111.txt").string(), "--blocklist", (kData / "blocklist.txt").string(),
                      "--affect", affect, "-k", extra_k});
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

// Runs the binary with stdout on a pipe.
struct Child {
  pid_t pid = -1;
  FILE* out = nullptr;

  std::string line() {
    std::array<char, 512> buf{};
    return fgets(buf.data(), buf.size(), out) ? std::string(buf.data()) : std::string();
  }
  int wait() {
    int status = 0;
    waitpid(pid, &status, 0);
    fclose(out);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

Child spawn(std::vector<std::string> args) {
  int fds[2];
  REQUIRE(pipe(fds) == 0);
  const pid_t pid = fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    args.insert(args.begin(), kBinary.string());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    _exit(127);
  }
  close(fds[1]);
  return {pid, fdopen(fds[0], "r")};
}

int run_binary(const std::string& args) {
  const int status = std::system((kBinary.string() + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("train") {
  const auto empty = scratch() / "empty_corpus";
  fs::create_directories(empty);
  const auto r = invoke({"train", "--corpus", empty.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("no corpus files") != std::string::npos);

  const auto toy = scratch() / "toy_corpus";
  fs::create_directories(toy);
  std::ofstream(toy / "a.txt") << "The cat sat on the mat. A dog barked!";
  const auto first = (scratch() / "toy1.json").string(), second = (scratch() / "toy2.json").string();
  const auto t1 = invoke({"train", "--corpus", toy.string(), "--out", first});
  REQUIRE(t1.code == 0);
  CHECK(t1.err.find("vocabulary D = 8") != std::string::npos);
  REQUIRE(invoke({"train", "--corpus", toy.string(), "--out", second}).code == 0);
  CHECK(slurp(first) == slurp(second));
  CHECK(invoke({"train", "--corpus", (scratch() / "nowhere").string()}).code == 2);
}

TEST_CASE("generate on the reference stems") {
  const auto& lexicon_path = kData / "lexicon" / "AFINN-111.txt";
  std::map<std::string, int> valence;
  std::ifstream lex(lexicon_path);
  for (std::string line; std::getline(lex, line);) {
    const auto tab = line.rfind('\t');
    valence[line.substr(0, tab)] = std::stoi(line.substr(tab + 1));
  }
  const auto pos = generate("positive");
  const auto neg = generate("negative");
  REQUIRE(pos.at("utterances").size() == 5);
  REQUIRE(neg.at("utterances").size() == 5);
  std::set<std::string> pos_words, neg_words;
  for (const auto& u : pos.at("utterances")) {
    CHECK(u.at("candidates").size() == 2);
    for (const auto& c : u.at("candidates")) {
      CHECK(valence.at(c.at("word")) > 0);
      pos_words.insert(c.at("word"));
    }
    CHECK(u.at("text").get<std::string>().find(u.at("word").get<std::string>()) != std::string::npos);
    CHECK(u.at("mixture_score").get<double>() > 0.0);
  }
  for (const auto& u : neg.at("utterances"))
    for (const auto& c : u.at("candidates")) {
      CHECK(valence.at(c.at("word")) < 0);
      neg_words.insert(c.at("word"));
    }
  for (const auto& w : pos_words) CHECK_FALSE(neg_words.contains(w));
  CHECK(generate("positive", "1").at("utterances")[0].at("candidates").size() == 1);

  const auto bad = invoke({"generate", "--bundle", sample_bundle(), "--templates",
                        (kData / "templates" / "reference_stems.json").string(), "--lexicon",
                        lexicon_path.string(), "--affect", "none"});
  CHECK(bad.code == 1);
}

TEST_CASE("simulate") {
  const auto a = invoke({"simulate", "--lambda", "0.5", "--rounds", kRounds, "--seed", "3", "--count", "50"});
  const auto b = invoke({"simulate", "--lambda", "0.5", "--rounds", kRounds, "--seed", "3", "--count", "50"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != invoke({"simulate", "--lambda", "0.5", "--rounds", kRounds, "--seed", "4", "--count", "50"}).out);

  const auto uniform = invoke({"simulate", "--lambda", "0", "--rounds", kRounds, "--seed", "1", "--count", "10000"});
  std::stringstream in(uniform.out);
  const auto events = session::choice_events(session::read_event_log(in));
  REQUIRE(events.size() == 10000);
  std::array<int, 8> histogram{};
  for (const auto& e : events) ++histogram[e.chosen_gate];
  // Expected 1250 per gate, sd about 33.
  for (int n : histogram) CHECK(std::abs(n - 1250) < 165);

  CHECK(invoke({"simulate", "--lambda", "-1", "--rounds", kRounds, "--seed", "1"}).code == 1);
  CHECK(invoke({"simulate", "--lambda", "1", "--rounds", "/nonexistent.ndjson", "--seed", "1"}).code == 2);
}

TEST_CASE("simulate then fit recovers lambda") {
  const auto log = (scratch() / "sim05.ndjson").string();
  REQUIRE(invoke({"simulate", "--lambda", "0.5", "--rounds", kRounds, "--seed", "11", "--count", "1000", "--out", log}).code == 0);
  const auto fit = invoke({"fit", "--log", log});
  REQUIRE(fit.code == 0);
  const auto report = json::parse(fit.out);
  CHECK(report.at("lambda_hat").get<double>() >= 0.45);
  CHECK(report.at("lambda_hat").get<double>() <= 0.55);
  CHECK(report.at("rounds_used") == 1000);

  const auto threaded = invoke({"fit", "--log", log, "--threads", "3"});
  CHECK(threaded.out == fit.out);
}

TEST_CASE("fit outputs and diagnostics") {
  const auto log = (scratch() / "sim35.ndjson").string();
  REQUIRE(invoke({"simulate", "--lambda", "0.3", "--rounds", kRounds, "--seed", "5", "--count", "35", "--affect", "negative",
               "--out", log}).code == 0);
  const auto series = (scratch() / "series.csv").string();
  REQUIRE(invoke({"fit", "--log", log, "--series", series}).code == 0);
  std::ifstream csv(series);
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) rows.push_back(line);
  REQUIRE(rows.size() == 36);
  CHECK(rows[0] == "round,lambda_hat");
  CHECK(rows[35].starts_with("34,"));

  const auto epqr = invoke({"fit", "--log", log, "--mode", "epqr", "--variant", "base"});
  CHECK(epqr.code == 0);
  CHECK(epqr.err.find("feature E") != std::string::npos);
  CHECK(json::parse(epqr.out).at("unidentifiable_features") == json::array({"E"}));
  CHECK(json::parse(epqr.out).at("weights")[2] == 0.0);
  CHECK(invoke({"fit", "--log", log, "--phase", "practice"}).code == 2);
  CHECK(invoke({"fit", "--log", log, "--mode", "epqr", "--series", series}).code == 1);
  CHECK(invoke({"fit", "--log", log, "--mode", "nonsense"}).code == 1);

  const auto empty = (scratch() / "empty.ndjson").string();
  std::ofstream(empty) << "\n";
  CHECK(invoke({"fit", "--log", empty}).code == 2);

  std::ifstream in(log);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  const auto broken = (scratch() / "broken.ndjson").string();
  std::ofstream(broken) << l1 << '\n' << l2 << "\n{\"seq\": 3, \"type\": \"choice\"\n";
  const auto bad = invoke({"fit", "--log", broken});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("make-rounds reproduces the shipped rounds file") {
  const auto r = invoke({"make-rounds", "--seed", "2018", "--count", "35"});
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(kRounds));
}

TEST_CASE("exit codes of the binary") {
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("") == 1);
  CHECK(run_binary("frobnicate") == 1);
  CHECK(run_binary("fit") == 1);
  CHECK(run_binary("fit --log /nonexistent.ndjson") == 2);
  CHECK(run_binary("make-rounds --count 2") == 0);
}

TEST_CASE("serve reports a missing input by path") {
  cli::ServeOptions o;
  o.data_dir = kData;
  o.bundle = sample_bundle();
  o.lexicon = "/nonexistent/lexicon.txt";
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(cli::start_service(o, log), doctest::Contains("/nonexistent/lexicon.txt"), DataError);
  CHECK(run_binary("serve --data " + kData.string() + " --bundle " + sample_bundle() + " --lexicon /nonexistent/l.txt") == 2);
  CHECK(run_binary("serve --data " + kData.string()) == 2);
}

TEST_CASE("serve runs a scripted session and shuts down on SIGINT") {
  const auto pos = (scratch() / "pos.json").string(), neg = (scratch() / "neg.json").string();
  std::ofstream(pos) << generate("positive").dump();
  std::ofstream(neg) << generate("negative").dump();
  const auto logs = scratch() / "serve_logs";

  auto child = spawn({"serve", "--data", kData.string(), "--positive-pool", pos, "--negative-pool", neg, "--port", "0",
                      "--log-dir", logs.string()});
  int port = 0;
  for (int i = 0; i < 20 && port == 0; ++i) {
    const auto line = child.line();
    if (line.empty()) break;
    if (const auto at = line.find("listening on 127.0.0.1:"); at != std::string::npos)
      port = std::stoi(line.substr(at + 23));
  }
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  const auto created = client.Post("/sessions", R"({"affect_condition": "negative", "seed": 8})", "application/json");
  REQUIRE(created);
  REQUIRE(created->status == 201);
  const auto id = json::parse(created->body).at("id").get<std::string>();
  for (int r = 0; r < 43; ++r) {
    const auto res = client.Post("/sessions/" + id + "/choice", json{{"round", r}, {"gate", r % 8}}.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
  }
  const auto served = client.Get("/sessions/" + id + "/rationality?phase=main");
  REQUIRE(served);

  kill(child.pid, SIGINT);
  std::string rest;
  for (auto line = child.line(); !line.empty(); line = child.line()) rest += line;
  CHECK(child.wait() == 0);
  CHECK(rest.find("stopped") != std::string::npos);

  const auto log_file = (logs / (id + ".ndjson")).string();
  const auto fit = invoke({"fit", "--log", log_file, "--phase", "main"});
  REQUIRE(fit.code == 0);
  CHECK(json::parse(fit.out).at("lambda_hat") == json::parse(served->body).at("lambda_hat"));
  CHECK(json::parse(fit.out).at("series") == json::parse(served->body).at("series"));
}
