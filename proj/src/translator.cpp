#include "rttqe/translator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rttqe/error.hpp"
#include "rttqe/random.hpp"
#include "rttqe/textmetrics.hpp"
#include "rttqe/unicode.hpp"

namespace rttqe {

std::vector<std::string> IdentityTranslator::translate(std::span<const std::string> texts,
                                                       std::string_view,
                                                       std::string_view) const {
  return {texts.begin(), texts.end()};
}

std::vector<std::string> ReverseWordsTranslator::translate(std::span<const std::string> texts,
                                                           std::string_view,
                                                           std::string_view) const {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    std::vector<std::string_view> words;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = text.find(' ', start);
      words.emplace_back(std::string_view(text).substr(start, end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    std::string reversed;
    reversed.reserve(text.size());
    for (auto it = words.rbegin(); it != words.rend(); ++it) {
      if (it != words.rbegin()) reversed += ' ';
      reversed += *it;
    }
    out.push_back(std::move(reversed));
  }
  return out;
}

int CipherTranslator::shift_of(std::string_view lang) {
  return static_cast<int>(random::fnv1a64(lang) % 26);
}

namespace {

std::string rotate(std::string_view text, int shift) {
  shift = ((shift % 26) + 26) % 26;
  std::string out(text);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>('a' + (c - 'a' + shift) % 26);
    else if (c >= 'A' && c <= 'Z') c = static_cast<char>('A' + (c - 'A' + shift) % 26);
  }
  return out;
}

}  // namespace

std::string CipherTranslator::encode(std::string_view text, std::string_view lang) {
  return rotate(text, shift_of(lang));
}

std::vector<std::string> CipherTranslator::translate(std::span<const std::string> texts,
                                                     std::string_view source_lang,
                                                     std::string_view target_lang) const {
  const int shift = shift_of(target_lang) - shift_of(source_lang);
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(rotate(text, shift));
  return out;
}

std::string format_rate(double rate) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", rate);
  return buffer;
}

DropoutTranslator::DropoutTranslator(TranslatorPtr base, double rate, std::uint64_t seed,
                                     std::string id)
    : base_(std::move(base)), rate_(rate), seed_(seed), id_(std::move(id)) {
  if (!base_) throw ValidationError("dropout translator needs a base translator");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("dropout rate must lie in [0, 1]");
  if (id_.empty()) id_ = base_->id() + "+drop" + format_rate(rate) + "@" + std::to_string(seed);
}

std::string DropoutTranslator::cache_key() const {
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.17g", rate_);
  return id_ + "|dropout(" + rate + "," + std::to_string(seed_) + ")|" +
         base_->cache_key();
}

std::string DropoutTranslator::drop(std::string_view text) const {
  if (rate_ == 0.0) return std::string(text);
  const TokenSequence tokens = tokenize_13a(text);
  const std::size_t n = tokens.size();
  // The epsilon keeps exact products such as 0.35 * 20 from flooring to 6.
  const auto removed = std::min(
      n, static_cast<std::size_t>(std::floor(rate_ * static_cast<double>(n) + 1e-9)));
  std::mt19937_64 rng(random::splitmix64(seed_ ^ random::fnv1a64(unicode::nfc(text))));
  const std::vector<std::size_t> order = random::permutation(rng, n);
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < removed; ++i) keep[order[i]] = false;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> DropoutTranslator::translate(std::span<const std::string> texts,
                                                      std::string_view source_lang,
                                                      std::string_view target_lang) const {
  std::vector<std::string> dropped;
  dropped.reserve(texts.size());
  for (const std::string& text : texts) dropped.push_back(drop(text));
  return base_->translate(dropped, source_lang, target_lang);
}

std::vector<std::string> CountingTranslator::translate(std::span<const std::string> texts,
                                                       std::string_view source_lang,
                                                       std::string_view target_lang) const {
  ++calls_;
  segments_ += texts.size();
  return base_->translate(texts, source_lang, target_lang);
}

}  // namespace rttqe
