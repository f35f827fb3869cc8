#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rttqe {

/// Monolingual corpus: one segment per line, NFC-normalized.
struct Corpus {
  std::string lang;
  std::vector<std::string> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Positionally aligned corpus; sources[i] translates to targets[i].
struct ParallelCorpus {
  std::string source_lang;
  std::string target_lang;
  std::vector<std::string> sources;
  std::vector<std::string> targets;

  std::size_t size() const { return sources.size(); }
};

/// Reads UTF-8 text, one segment per line. A leading BOM is stripped, CRLF
/// and LF endings are both accepted, and the final newline is optional.
/// Invalid UTF-8 raises ValidationError naming the line.
Corpus load_corpus(const std::filesystem::path& path, std::string lang);
Corpus parse_corpus(std::string_view bytes, std::string lang, std::string_view origin = "<memory>");

/// Writes LF-terminated lines.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

ParallelCorpus align_parallel(const Corpus& a, const Corpus& b);

enum class ResourceClass { high, medium, low };
enum class Usage { train_test, test };

std::string to_string(ResourceClass resource);
std::string to_string(Usage usage);

struct LanguageSpec {
  std::string code;
  ResourceClass resource = ResourceClass::medium;
  Usage usage = Usage::train_test;
};

/// CSV with header `code,resource,usage`; usage is `train+test` or `test`.
std::vector<LanguageSpec> load_registry(const std::filesystem::path& path);
std::vector<LanguageSpec> parse_registry(std::string_view text);

/// Ordered (directed) language pair.
struct LanguagePair {
  std::string source;
  std::string target;

  /// "de-fr"
  std::string str() const { return source + "-" + target; }
  static LanguagePair parse(std::string_view text);

  friend auto operator<=>(const LanguagePair&, const LanguagePair&) = default;
};

struct PairPartition {
  /// Both languages train+test.
  std::vector<LanguagePair> type1;
  /// Exactly one test-only language.
  std::vector<LanguagePair> type2;
  /// Both languages test-only.
  std::vector<LanguagePair> type3;
};

PairPartition enumerate_pairs(const std::vector<LanguageSpec>& registry);

}  // namespace rttqe
