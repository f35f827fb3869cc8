#include <doctest.h>

#include "rttqe/scoring.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace rttqe;

namespace {

Corpus make_corpus(std::string lang, std::uint64_t seed, std::size_t n = 40) {
  return {std::move(lang), synthetic::corpus(seed, n)};
}

std::vector<Metric> two_metrics() { return {Metric(MetricId::bleu_13a()), Metric(MetricId::chrf())}; }

}  // namespace

TEST_CASE("direction tags") {
  CHECK(to_string(Direction::forward) == "A→B");
  CHECK(to_string(Direction::self_ab) == "A⟲B");
  CHECK(to_string(Direction::self_ba) == "B⟲A");
  CHECK(parse_direction("A->B") == Direction::forward);
  CHECK(parse_direction("A@B") == Direction::self_ab);
  CHECK(parse_direction("B⟲A") == Direction::self_ba);
  CHECK_THROWS_AS(parse_direction("sideways"), ValidationError);
}

TEST_CASE("trans_score examples") {
  const auto corpus = make_corpus("en", 1);
  const ParallelCorpus parallel{"en", "de", corpus.segments, corpus.segments};
  auto identity = std::make_shared<IdentityTranslator>();
  const Metric bleu(MetricId::bleu_13a());

  auto record = trans_score(*identity, parallel, bleu);
  CHECK(record.score == 100.0);
  CHECK(record.direction == Direction::forward);
  REQUIRE(record.aux.has_value());
  CHECK(record.segment_count == corpus.size());

  DropoutTranslator all(identity, 1.0, 3);
  CHECK(trans_score(all, parallel, bleu).score == 0.0);
  CHECK_FALSE(trans_score(*identity, parallel, Metric(MetricId::chrf())).aux.has_value());
}

TEST_CASE("trans_score matches a step-by-step recomputation") {
  const auto corpus = make_corpus("en", 2, 100);
  const auto refs = synthetic::corpus(3, 100);
  const ParallelCorpus parallel{"en", "de", corpus.segments, refs};
  auto identity = std::make_shared<IdentityTranslator>();
  DropoutTranslator drop(identity, 0.25, 7);
  for (const auto& id : {MetricId::bleu_13a(), MetricId::chrf(), MetricId::bleu_13a(Aggregation::sentence_average)}) {
    const Metric metric(id);
    std::vector<std::string> hyps;
    for (const auto& s : corpus.segments) hyps.push_back(drop.drop(s));
    CHECK(trans_score(drop, parallel, metric).score == metric.score(hyps, refs).score);
  }
}

TEST_CASE("self_score examples") {
  const auto corpus = make_corpus("en", 4);
  const LanguagePair pair{"en", "de"};
  auto identity = std::make_shared<IdentityTranslator>();
  ReverseWordsTranslator reverse;
  const Metric chrf(MetricId::chrf());
  CHECK(self_score(Direction::self_ab, pair, *identity, *identity, corpus, chrf).score == 100.0);
  CHECK(self_score(Direction::self_ab, pair, reverse, reverse, corpus, chrf).score == 100.0);

  DropoutTranslator drop(identity, 0.4, 11);
  const ParallelCorpus self_ref{"en", "en", corpus.segments, corpus.segments};
  for (auto id : {MetricId::bleu_13a(), MetricId::chrf(), MetricId::spbleu(Aggregation::sentence_average)}) {
    const Metric metric(id);
    CHECK(self_score(Direction::self_ab, pair, drop, *identity, corpus, metric).score ==
          trans_score(drop, self_ref, metric).score);
  }

  Corpus wrong = corpus;
  wrong.lang = "de";
  CHECK_THROWS_AS(self_score(Direction::self_ab, pair, drop, *identity, wrong, chrf), ValidationError);
  CHECK_THROWS_AS(self_score(Direction::forward, pair, drop, *identity, corpus, chrf), ValidationError);
}

TEST_CASE("score_matrix cardinality, ordering and determinism") {
  ScoreMatrixRequest request;
  request.pairs = {{"en", "de"}};
  request.systems = {"reverse-words"};
  request.corpora = {{"en", make_corpus("en", 5)}, {"de", make_corpus("de", 6)}};
  request.metrics = two_metrics();
  request.pairs.push_back({"de", "en"});
  const TranslatorFactory factory = [](const std::string&, const std::string&, const std::string&) {
    return std::make_shared<ReverseWordsTranslator>();
  };
  const auto result = score_matrix(request, factory);
  CHECK(result.records.size() == 12);
  CHECK(std::is_sorted(result.records.begin(), result.records.end(), record_less));
  CHECK(records_to_jsonl(score_matrix(request, factory).records) == records_to_jsonl(result.records));

  request.pairs.clear();
  CHECK(score_matrix(request, factory).records.empty());

  request.pairs = {{"en", "fr"}};
  const auto missing = score_matrix(request, factory);
  CHECK(missing.records.empty());
  CHECK(missing.diagnostics.size() == 1);
}

TEST_CASE("score_matrix keeps self-scores when corpus sizes differ") {
  ScoreMatrixRequest request;
  request.pairs = {{"en", "de"}};
  request.systems = {"identity"};
  request.corpora = {{"en", make_corpus("en", 5, 10)}, {"de", make_corpus("de", 6, 12)}};
  request.metrics = two_metrics();
  const TranslatorFactory factory = [](const std::string&, const std::string&, const std::string&) {
    return std::make_shared<IdentityTranslator>();
  };
  const auto result = score_matrix(request, factory);
  CHECK(result.records.size() == 4);
  for (const auto& r : result.records) CHECK(r.direction != Direction::forward);
}

TEST_CASE("score records survive JSONL") {
  const auto corpus = make_corpus("en", 8);
  const ParallelCorpus parallel{"en", "de", corpus.segments, corpus.segments};
  auto identity = std::make_shared<IdentityTranslator>();
  DropoutTranslator drop(identity, 0.3, 1, "drop-0.30");
  std::vector<ScoreRecord> records;
  for (auto id : {MetricId::bleu_13a(Aggregation::sentence_average, Smoothing::add_k(1)), MetricId::chrf(),
                  MetricId::spbleu(Aggregation::corpus, Smoothing::none())}) {
    records.push_back(trans_score(drop, parallel, Metric(id)));
  }
  records.push_back(self_score(Direction::self_ab, {"en", "de"}, drop, *identity, corpus, Metric(MetricId::chrf())));
  records.back().provenance = {"rtt-qe 1.0.0", "abc"};

  TempDir dir;
  write_records(dir.path() / "r.jsonl", records);
  const auto back = read_records(dir.path() / "r.jsonl");
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == records[i]);
  CHECK(records_to_jsonl(back) == records_to_jsonl(records));
}
