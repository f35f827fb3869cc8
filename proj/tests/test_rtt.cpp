#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>

#include "rttqe/rtt.hpp"
#include "rttqe/textmetrics.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace rttqe;

namespace {

std::vector<std::string> words(std::string_view text) {
  return tokenize_13a(text);
}

/// Fails every call whose batch contains `poison`.
class PoisonTranslator final : public Translator {
 public:
  explicit PoisonTranslator(std::string poison) : poison_(std::move(poison)) {}
  std::string id() const override { return "poison"; }
  std::vector<std::string> translate(std::span<const std::string> texts, std::string_view,
                                     std::string_view) const override {
    for (const auto& t : texts) {
      if (t == poison_) throw TranslatorError("refused", 0);
    }
    return {texts.begin(), texts.end()};
  }

 private:
  std::string poison_;
};

}  // namespace

TEST_CASE("mock translators") {
  const std::vector<std::string> in = {"a b c", " double  space ", ""};
  IdentityTranslator identity;
  CHECK(identity.translate(in, "en", "de") == in);

  ReverseWordsTranslator reverse;
  const auto once = reverse.translate(in, "en", "de");
  CHECK(once[0] == "c b a");
  CHECK(reverse.translate(once, "de", "en") == in);

  CipherTranslator cipher;
  const auto de = cipher.translate(in, "en", "de");
  CHECK(cipher.translate(de, "de", "en") == in);
  CHECK(CipherTranslator::encode("hello", "en") == cipher.translate(std::vector<std::string>{CipherTranslator::encode("hello", "de")}, "de", "en")[0]);
}

TEST_CASE("dropout removes floor(rate * n) tokens reproducibly") {
  auto identity = std::make_shared<IdentityTranslator>();
  DropoutTranslator half(identity, 0.5, 42);
  const std::string text = "alpha beta gamma delta";
  const std::string dropped = half.drop(text);
  CHECK(words(dropped).size() == 2);
  CHECK(DropoutTranslator(identity, 0.5, 42).drop(text) == dropped);

  DropoutTranslator none(identity, 0.0, 42);
  CHECK(none.drop("keep  this, exactly") == "keep  this, exactly");
  DropoutTranslator all(identity, 1.0, 42);
  CHECK(all.drop("gone, all of it.") == "");
  CHECK(all.drop("") == "");

  CHECK_THROWS_AS(DropoutTranslator(identity, 1.5, 1), ValidationError);
  CHECK_THROWS_AS(DropoutTranslator(identity, -0.1, 1), ValidationError);
}

TEST_CASE("dropout sets are nested across rates for a fixed seed") {
  auto identity = std::make_shared<IdentityTranslator>();
  const auto corpus = synthetic::corpus(9, 50);
  for (const auto& text : corpus) {
    std::vector<std::string> previous = words(text);
    for (int step = 1; step <= 16; ++step) {
      DropoutTranslator drop(identity, step * 0.05, 77);
      const auto kept = words(drop.drop(text));
      CHECK(kept.size() == words(text).size() - static_cast<std::size_t>(std::floor(step * 0.05 * words(text).size() + 1e-9)));
      // kept must be a subsequence of previous
      std::size_t j = 0;
      for (const auto& w : previous) {
        if (j < kept.size() && kept[j] == w) ++j;
      }
      CHECK(j == kept.size());
      previous = kept;
    }
  }
}

TEST_CASE("dropout does not depend on batching") {
  auto identity = std::make_shared<IdentityTranslator>();
  DropoutTranslator drop(identity, 0.3, 5);
  const auto corpus = synthetic::corpus(2, 20);
  const auto all = drop.translate(corpus, "en", "de");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(drop.translate(std::span(corpus).subspan(i, 1), "en", "de")[0] == all[i]);
  }
}

TEST_CASE("dropout cache key reflects rate and seed") {
  auto identity = std::make_shared<IdentityTranslator>();
  DropoutTranslator a(identity, 0.3, 5, "sys");
  DropoutTranslator b(identity, 0.3, 6, "sys");
  DropoutTranslator c(identity, 0.35, 5, "sys");
  CHECK(a.id() == b.id());
  CHECK(a.cache_key() != b.cache_key());
  CHECK(a.cache_key() != c.cache_key());
}

TEST_CASE("round_trip examples") {
  auto identity = std::make_shared<IdentityTranslator>();
  const std::vector<std::string> src = {"one two", "three, four."};
  auto r = round_trip(src, "en", "de", *identity, *identity);
  CHECK(r.back == src);
  CHECK(r.forward.size() == src.size());

  DropoutTranslator all(identity, 1.0, 1);
  r = round_trip(src, "en", "de", all, *identity);
  CHECK(r.back == std::vector<std::string>{"", ""});

  ReverseWordsTranslator reverse;
  r = round_trip(src, "en", "de", reverse, reverse);
  CHECK(r.back == src);
  CHECK(r.forward_system == "reverse-words");

  CHECK_THROWS_AS(round_trip({}, "en", "de", *identity, *identity), ValidationError);
}

TEST_CASE("cache hits skip the translator") {
  TempDir dir;
  TranslationCache cache(dir.path());
  auto counter = std::make_shared<CountingTranslator>(std::make_shared<IdentityTranslator>());
  const std::vector<std::string> first = {"a", "b", "c"};

  auto r1 = cached_translate(&cache, *counter, first, "en", "de");
  CHECK(r1.texts == first);
  CHECK(r1.forwarded == 3);
  CHECK(counter->segments() == 3);

  counter->reset();
  auto r2 = cached_translate(&cache, *counter, first, "en", "de");
  CHECK(r2.texts == first);
  CHECK(counter->calls() == 0);
  CHECK(r2.hits == 3);

  counter->reset();
  const std::vector<std::string> disjoint = {"x", "y"};
  cached_translate(&cache, *counter, disjoint, "en", "de");
  CHECK(counter->segments() == 2);

  counter->reset();
  const std::vector<std::string> mixed = {"a", "new1", "b", "c", "new2"};
  auto r3 = cached_translate(&cache, *counter, mixed, "en", "de");
  CHECK(counter->segments() == 2);
  CHECK(r3.texts == mixed);
  CHECK(r3.hits == 3);

  // Other direction is a different log.
  counter->reset();
  cached_translate(&cache, *counter, first, "de", "en");
  CHECK(counter->segments() == 3);
}

TEST_CASE("cache survives reopen and a torn final line") {
  TempDir dir;
  ReverseWordsTranslator reverse;
  const std::vector<std::string> texts = {"one two", "three four", "five six"};
  std::filesystem::path log;
  {
    TranslationCache cache(dir.path());
    cached_translate(&cache, reverse, texts, "en", "de");
    log = cache.log_path("reverse-words", "en", "de");
  }
  REQUIRE(std::filesystem::exists(log));
  {
    std::ofstream out(log, std::ios::app | std::ios::binary);
    out << "{\"system\":\"reverse-words\",\"dig";
  }
  TranslationCache cache(dir.path());
  auto counter = std::make_shared<CountingTranslator>(std::make_shared<ReverseWordsTranslator>());
  auto r = cached_translate(&cache, *counter, texts, "en", "de");
  CHECK(counter->calls() == 0);
  CHECK(r.texts[0] == "two one");
  CHECK(cache.loaded_entries() == 3);

  // New entries appended after the torn line are still readable.
  cached_translate(&cache, *counter, std::vector<std::string>{"seven eight"}, "en", "de");
  TranslationCache reopened(dir.path());
  CHECK(reopened.lookup({"reverse-words", "en", "de", content_digest("seven eight")}) == "eight seven");
}

TEST_CASE("content digest is NFC-insensitive") {
  CHECK(content_digest("caf\xC3\xA9") == content_digest("cafe\xCC\x81"));
  CHECK(content_digest("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("unwritable cache degrades to pass-through") {
  TempDir dir;
  const auto blocker = dir.path() / "file";
  std::ofstream(blocker) << "x";
  TranslationCache cache(blocker / "cache");
  IdentityTranslator identity;
  const std::vector<std::string> texts = {"a"};
  auto r = cached_translate(&cache, identity, texts, "en", "de");
  CHECK(r.texts == texts);
  CHECK(cache.degraded());
  CHECK(r.cache_degraded);
  CHECK_FALSE(cache.warning().empty());
}

TEST_CASE("failed batch is reported and earlier batches stay cached") {
  TempDir dir;
  TranslationCache cache(dir.path());
  PoisonTranslator poison("p");
  const std::vector<std::string> texts = {"a", "b", "c", "d", "p", "e"};
  TranslateOptions options{2, 1};
  try {
    cached_translate(&cache, poison, texts, "en", "de", options);
    FAIL("expected TranslatorError");
  } catch (const TranslatorError& e) {
    CHECK(e.batch_index() == 2);
  }
  CHECK(cache.lookup({"poison", "en", "de", content_digest("a")}) == "a");
  CHECK(cache.lookup({"poison", "en", "de", content_digest("d")}) == "d");
  CHECK_FALSE(cache.lookup({"poison", "en", "de", content_digest("e")}).has_value());
}

TEST_CASE("concurrent batches preserve order") {
  TempDir dir;
  TranslationCache cache(dir.path());
  ReverseWordsTranslator reverse;
  const auto corpus = synthetic::corpus(4, 200);
  auto r = cached_translate(&cache, reverse, corpus, "en", "de", {7, 4});
  REQUIRE(r.texts.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(r.texts[i] == reverse.translate(std::span(corpus).subspan(i, 1), "en", "de")[0]);
  }
}

TEST_CASE("copy statistics") {
  const std::vector<std::string> same = {"a b c", "d e"};
  auto s = copy_stats(same, same);
  CHECK(s.avg_copy_pct == 100.0);
  CHECK(s.avg_copy_count == 2.5);

  s = copy_stats({"a b c"}, {"x y"});
  CHECK(s.avg_copy_count == 0.0);
  CHECK(s.avg_copy_pct == 0.0);

  s = copy_stats({"a b c"}, {"a x"});
  CHECK(s.avg_copy_count == 1.0);
  CHECK(s.avg_copy_pct == 50.0);
  CHECK(s.avg_copy_pct_of_source == doctest::Approx(100.0 / 3));

  CHECK(copied_tokens("a a b", "a a a") == 2);
  CHECK(copied_tokens("A", "a") == 0);
  CHECK(copy_stats({"a"}, {""}).avg_copy_pct == 0.0);
  CHECK_THROWS_AS(copy_stats({"a"}, {}), ValidationError);
}

TEST_CASE("copy rate bounds") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = synthetic::sentence(rng, rng() % 6);
    const auto b = synthetic::sentence(rng, rng() % 6);
    const auto s = copy_stats({a}, {b});
    CHECK(s.avg_copy_pct >= 0.0);
    CHECK(s.avg_copy_pct <= 100.0);
    CHECK(copied_tokens(a, b) <= std::min(words(a).size(), words(b).size()));
  }
}
