#pragma once

// Persistent translation cache.
//
// One append-only JSON-lines log per (system, source lang, target lang),
// each record holding the full key, the translation, and a creation time.
// The in-memory index for a log is built the first time it is touched.
// A torn final line (crash mid-append) is skipped on load; when the same key
// appears twice, the first record wins.
//
// Readers share a lock; appends are serialized. If the directory cannot be
// created or written, the cache degrades to pass-through and says so via
// degraded() instead of failing the run.

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rttqe/translator.hpp"

namespace rttqe {

/// Hex SHA-256 of the NFC-normalized text.
std::string content_digest(std::string_view text);

struct CacheKey {
  std::string system;
  std::string source_lang;
  std::string target_lang;
  std::string digest;
};

class TranslationCache {
 public:
  explicit TranslationCache(std::filesystem::path directory);

  TranslationCache(const TranslationCache&) = delete;
  TranslationCache& operator=(const TranslationCache&) = delete;

  std::optional<std::string> lookup(const CacheKey& key);

  /// Appends (source digest, translation) records to the log for the
  /// (system, direction). Keys already present are not re-appended.
  void store(std::string_view system, std::string_view source_lang, std::string_view target_lang,
             std::span<const std::pair<std::string, std::string>> digest_translation);

  bool degraded() const;
  std::string warning() const;
  const std::filesystem::path& directory() const { return directory_; }

  /// Number of indexed entries across all logs loaded so far.
  std::size_t loaded_entries() const;

  std::filesystem::path log_path(std::string_view system, std::string_view source_lang,
                                 std::string_view target_lang) const;

 private:
  using Index = std::unordered_map<std::string, std::string>;

  Index& index_for(const std::string& log_name, std::string_view system,
                   std::string_view source_lang, std::string_view target_lang);
  void mark_degraded(std::string message);

  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Index> indexes_;
  bool degraded_ = false;
  std::string warning_;
};

struct TranslateOptions {
  std::size_t batch_size = 32;
  std::size_t concurrency = 4;
};

struct CachedTranslation {
  std::vector<std::string> texts;
  std::size_t hits = 0;
  /// Distinct texts sent to the translator.
  std::size_t forwarded = 0;
  bool cache_degraded = false;
};

/// Translates `texts`, consulting `cache` (may be null) first. Only distinct
/// cache misses reach the translator, in batches; each successful batch is
/// persisted before the call returns or fails. A failing batch raises
/// TranslatorError carrying its batch index.
CachedTranslation cached_translate(TranslationCache* cache, const Translator& translator,
                                   std::span<const std::string> texts,
                                   std::string_view source_lang, std::string_view target_lang,
                                   const TranslateOptions& options = {});

}  // namespace rttqe
