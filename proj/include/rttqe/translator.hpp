#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rttqe {

/// A machine translation system. Implementations must return exactly one
/// output per input, in input order, and must be safe to call concurrently.
class Translator {
 public:
  virtual ~Translator() = default;

  /// Stable identifier reported in score records.
  virtual std::string id() const = 0;

  /// Identifies the exact behavior for caching. Must change whenever the
  /// output for some input could change (e.g. a different seed).
  virtual std::string cache_key() const { return id(); }

  virtual std::vector<std::string> translate(std::span<const std::string> texts,
                                             std::string_view source_lang,
                                             std::string_view target_lang) const = 0;
};

using TranslatorPtr = std::shared_ptr<const Translator>;

class IdentityTranslator final : public Translator {
 public:
  explicit IdentityTranslator(std::string id = "identity") : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  std::vector<std::string> translate(std::span<const std::string> texts, std::string_view,
                                     std::string_view) const override;

 private:
  std::string id_;
};

/// Reverses the order of space-separated words. An involution on any string.
class ReverseWordsTranslator final : public Translator {
 public:
  explicit ReverseWordsTranslator(std::string id = "reverse-words") : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  std::vector<std::string> translate(std::span<const std::string> texts, std::string_view,
                                     std::string_view) const override;

 private:
  std::string id_;
};

/// Synthetic multilingual system: each language code owns a fixed rotation of
/// the ASCII alphabet, and translating rotates from the source language's
/// alphabet into the target's. Round trips through it are exact.
class CipherTranslator final : public Translator {
 public:
  explicit CipherTranslator(std::string id = "cipher") : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  std::vector<std::string> translate(std::span<const std::string> texts,
                                     std::string_view source_lang,
                                     std::string_view target_lang) const override;

  static int shift_of(std::string_view lang);
  /// Renders latent (rotation 0) text in `lang`.
  static std::string encode(std::string_view text, std::string_view lang);

 private:
  std::string id_;
};

/// Drops floor(rate * n) of the n 13a tokens of each input, chosen by a
/// seeded draw without replacement, rejoins the survivors with single
/// spaces, then hands the result to `base`.
///
/// The draw is a function of (seed, input text) only, so results do not
/// depend on batching, and for a fixed seed the set removed at a lower rate
/// is contained in the set removed at any higher rate.
class DropoutTranslator final : public Translator {
 public:
  DropoutTranslator(TranslatorPtr base, double rate, std::uint64_t seed, std::string id = {});

  std::string id() const override { return id_; }
  std::string cache_key() const override;
  std::vector<std::string> translate(std::span<const std::string> texts,
                                     std::string_view source_lang,
                                     std::string_view target_lang) const override;

  std::string drop(std::string_view text) const;
  double rate() const { return rate_; }
  std::uint64_t seed() const { return seed_; }

 private:
  TranslatorPtr base_;
  double rate_;
  std::uint64_t seed_;
  std::string id_;
};

/// Forwards to `base` and counts invocations and translated segments.
class CountingTranslator final : public Translator {
 public:
  explicit CountingTranslator(TranslatorPtr base) : base_(std::move(base)) {}

  std::string id() const override { return base_->id(); }
  std::string cache_key() const override { return base_->cache_key(); }
  std::vector<std::string> translate(std::span<const std::string> texts,
                                     std::string_view source_lang,
                                     std::string_view target_lang) const override;

  std::size_t calls() const { return calls_.load(); }
  std::size_t segments() const { return segments_.load(); }
  void reset() {
    calls_ = 0;
    segments_ = 0;
  }

 private:
  TranslatorPtr base_;
  mutable std::atomic<std::size_t> calls_{0};
  mutable std::atomic<std::size_t> segments_{0};
};

/// Formats a dropout rate the way system names use it, e.g. "0.05".
std::string format_rate(double rate);

}  // namespace rttqe
