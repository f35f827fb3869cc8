#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rttqe/cli.hpp"
#include "rttqe/dataset.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace rttqe;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::size_t calls_line(const std::string& out) {
  const auto pos = out.find("translator calls: ");
  REQUIRE(pos != std::string::npos);
  return std::stoul(out.substr(pos + 18));
}

}  // namespace

TEST_CASE("partition prints the bundled counts") {
  const auto r = run({"partition"});
  CHECK(r.code == 0);
  CHECK(r.out.find("(380, 520, 156)") != std::string::npos);
  const auto j = json::parse(run({"partition", "--json"}).out);
  CHECK(j["type3"] == 156);
}

TEST_CASE("synth materializes 17 competitors") {
  TempDir dir;
  const auto path = dir.path() / "cfg.json";
  CHECK(run({"synth", "--seed", "3", "--out", path.string()}).code == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["systems"].size() == 17);
  for (int i = 0; i <= 16; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "drop-%.2f", i * 0.05);
    REQUIRE(j["systems"].contains(name));
    CHECK(j["systems"][name]["rate"].get<double>() == doctest::Approx(i * 0.05));
  }
  CHECK(run({"synth"}).code == kExitValidation);
}

TEST_CASE("roundtrip writes outputs and reuses the cache") {
  TempDir dir;
  const auto corpus = dir.path() / "c.en";
  std::string text;
  for (const auto& s : synthetic::corpus(1, 30)) text += s + "\n";
  spit(corpus, text);
  const std::string cache = (dir.path() / "cache").string();

  auto r = run({"roundtrip", "--corpus", corpus.string(), "--src", "en", "--pivot", "de", "--fwd",
                "identity", "--back", "identity", "--cache-dir", cache});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.path() / "c.en.identity.identity.en") == text);
  CHECK(calls_line(r.out) > 0);

  r = run({"roundtrip", "--corpus", corpus.string(), "--src", "en", "--pivot", "de", "--fwd",
           "identity", "--back", "identity", "--cache-dir", cache});
  CHECK(calls_line(r.out) == 0);

  const auto cfg = dir.path() / "cfg.json";
  spit(cfg, R"({"seed": 9, "systems": {"half": {"type": "dropout", "base": "identity", "rate": 0.5}}})");
  std::vector<std::string> args = {"roundtrip", "--config", cfg.string(), "--corpus", corpus.string(),
                                   "--src", "en", "--pivot", "de", "--fwd", "half", "--back", "identity",
                                   "--no-cache"};
  REQUIRE(run(args).code == 0);
  const auto first = slurp(dir.path() / "c.en.half.identity.en");
  const auto meta = slurp(dir.path() / "c.en.half.identity.meta.json");
  REQUIRE(run(args).code == 0);
  CHECK(slurp(dir.path() / "c.en.half.identity.en") == first);
  CHECK(slurp(dir.path() / "c.en.half.identity.meta.json") == meta);
  CHECK(first != text);
  CHECK(json::parse(meta)["config_digest"].get<std::string>().size() == 64);

  spit(cfg, R"({"systems": {"half": {"type": "dropout", "base": "identity", "rate": 0.5}}})");
  CHECK(run(args).code == kExitValidation);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run({"copystats", "--source", (dir.path() / "nope").string(), "--output", "x"}).code == kExitValidation);
  CHECK(run({"frobnicate"}).code == kExitValidation);
  CHECK(run({"--help"}).code == kExitOk);

  const auto corpus = dir.path() / "c.en";
  spit(corpus, "hello\n");
  const auto cfg = dir.path() / "cfg.json";
  spit(cfg, R"({"translator": {"max_retries": 0, "timeout_ms": 200},
               "systems": {"remote": {"type": "http", "endpoint": "http://127.0.0.1:1"}}})");
  const auto r = run({"roundtrip", "--config", cfg.string(), "--corpus", corpus.string(), "--src", "en",
                      "--pivot", "de", "--fwd", "remote", "--back", "identity", "--no-cache"});
  CHECK(r.code == kExitTranslator);
  CHECK(r.err.find("batch 0") != std::string::npos);
}

TEST_CASE("copystats hand case") {
  TempDir dir;
  spit(dir.path() / "s", "a b c\n");
  spit(dir.path() / "o", "a x\n");
  const auto r = run({"copystats", "--source", (dir.path() / "s").string(), "--output", (dir.path() / "o").string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["avg_copy_count"] == 1.0);
  CHECK(j["avg_copy_pct"] == 50.0);
}

TEST_CASE("eval with identical prediction and truth files") {
  TempDir dir;
  spit(dir.path() / "p", "10\n20.5\n30\n");
  const auto out = dir.path() / "report.json";
  const auto r = run({"eval", "--pred", (dir.path() / "p").string(), "--truth", (dir.path() / "p").string(),
                      "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(out));
  CHECK(j["mae"] == 0.0);
  CHECK(j["rmse"] == 0.0);
  CHECK(j["pearson_r"].get<double>() == doctest::Approx(1.0));
  CHECK(j.contains("config_digest"));
}

TEST_CASE("score, fit, predict, rank pipeline") {
  TempDir dir;
  const auto cache = (dir.path() / "cache").string();
  std::vector<std::string> score_args = {"score", "--cache-dir", cache, "--systems", "identity,reverse-words",
                                         "--metrics", "bleu-13a,chrf", "--pairs", "en-de,de-en,en-fr,fr-en,de-fr,fr-de"};
  for (const auto& [lang, seed] : std::vector<std::pair<std::string, int>>{{"en", 1}, {"de", 2}, {"fr", 3}}) {
    std::string text;
    for (const auto& s : synthetic::corpus(seed, 20)) text += s + "\n";
    spit(dir.path() / lang, text);
    score_args.push_back("--corpus");
    score_args.push_back(lang + "=" + (dir.path() / lang).string());
  }
  const auto records = dir.path() / "records.jsonl";
  score_args.push_back("--out");
  score_args.push_back(records.string());
  REQUIRE(run(score_args).code == 0);
  const auto first = slurp(records);
  REQUIRE(run(score_args).code == 0);
  CHECK(slurp(records) == first);
  std::size_t lines = std::count(first.begin(), first.end(), '\n');
  CHECK(lines == 6 * 2 * 3 * 2);

  const auto model = dir.path() / "model.json";
  auto r = run({"fit", "--records", records.string(), "--feature-metric", "chrf", "--target", "bleu-13a",
                "--out", model.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(model))["format_version"] == "rtt-qe-linear/1");

  const auto predictions = dir.path() / "pred.jsonl";
  r = run({"predict", "--model", model.string(), "--records", records.string(), "--out", predictions.string()});
  REQUIRE(r.code == 0);
  const auto pred_text = slurp(predictions);
  CHECK(std::count(pred_text.begin(), pred_text.end(), '\n') == 12);

  r = run({"rank", "--predictions", predictions.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("en-de") != std::string::npos);

  r = run({"eval", "--predictions", predictions.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("MAE") != std::string::npos);

  const auto plot = dir.path() / "plot.csv";
  r = run({"eval", "--records", records.string(), "--plot-data", plot.string()});
  CHECK(r.code == 0);
  CHECK(slurp(plot).find("trans_score") != std::string::npos);
}
