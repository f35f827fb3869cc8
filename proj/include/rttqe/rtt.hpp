#pragma once

#include <string>
#include <vector>

#include "rttqe/translation_cache.hpp"
#include "rttqe/translator.hpp"

namespace rttqe {

/// How translations are executed: through which cache (null for none) and
/// with what batching.
struct TranslationContext {
  TranslationCache* cache = nullptr;
  TranslateOptions options{};
};

struct RoundTripResult {
  std::string source_lang;
  std::string pivot_lang;
  std::string forward_system;
  std::string back_system;
  std::vector<std::string> sources;
  std::vector<std::string> forward;
  std::vector<std::string> back;

  friend bool operator==(const RoundTripResult&, const RoundTripResult&) = default;
};

/// Translates `sources` into `pivot_lang` with `forward`, then back into
/// `source_lang` with `back`, every step going through the context's cache.
RoundTripResult round_trip(const std::vector<std::string>& sources, std::string_view source_lang,
                           std::string_view pivot_lang, const Translator& forward,
                           const Translator& back, const TranslationContext& context = {});

struct CopyStats {
  double avg_copy_count = 0.0;
  /// Copied tokens over output tokens, per sentence, averaged.
  double avg_copy_pct = 0.0;
  /// Same with source tokens as the denominator.
  double avg_copy_pct_of_source = 0.0;
  std::size_t sentences = 0;
};

/// Per-sentence copied-token count is the case-sensitive multiset
/// intersection of 13a tokens of source and output.
std::size_t copied_tokens(std::string_view source, std::string_view output);

CopyStats copy_stats(const std::vector<std::string>& sources,
                     const std::vector<std::string>& outputs);

}  // namespace rttqe
