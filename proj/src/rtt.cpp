#include "rttqe/rtt.hpp"

#include <algorithm>
#include <map>

#include "rttqe/error.hpp"
#include "rttqe/textmetrics.hpp"

namespace rttqe {

RoundTripResult round_trip(const std::vector<std::string>& sources, std::string_view source_lang,
                           std::string_view pivot_lang, const Translator& forward,
                           const Translator& back, const TranslationContext& context) {
  if (sources.empty()) throw ValidationError("round trip needs a nonempty corpus");
  RoundTripResult result;
  result.source_lang = source_lang;
  result.pivot_lang = pivot_lang;
  result.forward_system = forward.id();
  result.back_system = back.id();
  result.sources = sources;
  result.forward =
      cached_translate(context.cache, forward, sources, source_lang, pivot_lang, context.options)
          .texts;
  result.back = cached_translate(context.cache, back, result.forward, pivot_lang, source_lang,
                                 context.options)
                    .texts;
  return result;
}

std::size_t copied_tokens(std::string_view source, std::string_view output) {
  std::map<std::string, std::size_t> source_counts;
  for (auto& token : tokenize_13a(source)) ++source_counts[token];
  std::map<std::string, std::size_t> output_counts;
  for (auto& token : tokenize_13a(output)) ++output_counts[token];
  std::size_t copied = 0;
  for (const auto& [token, count] : output_counts) {
    auto it = source_counts.find(token);
    if (it != source_counts.end()) copied += std::min(count, it->second);
  }
  return copied;
}

CopyStats copy_stats(const std::vector<std::string>& sources,
                     const std::vector<std::string>& outputs) {
  if (sources.size() != outputs.size()) {
    throw ValidationError("copy statistics need equal-length lists: " +
                          std::to_string(sources.size()) + " vs " + std::to_string(outputs.size()));
  }
  CopyStats stats;
  stats.sentences = sources.size();
  if (sources.empty()) return stats;
  double count_sum = 0.0;
  double pct_sum = 0.0;
  double source_pct_sum = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::size_t copied = copied_tokens(sources[i], outputs[i]);
    const std::size_t output_len = tokenize_13a(outputs[i]).size();
    const std::size_t source_len = tokenize_13a(sources[i]).size();
    count_sum += static_cast<double>(copied);
    if (output_len > 0) pct_sum += 100.0 * static_cast<double>(copied) / output_len;
    if (source_len > 0) source_pct_sum += 100.0 * static_cast<double>(copied) / source_len;
  }
  const auto n = static_cast<double>(sources.size());
  stats.avg_copy_count = count_sum / n;
  stats.avg_copy_pct = pct_sum / n;
  stats.avg_copy_pct_of_source = source_pct_sum / n;
  return stats;
}

}  // namespace rttqe
