#include "rttqe/translation_cache.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"
#include "rttqe/random.hpp"
#include "rttqe/unicode.hpp"

namespace rttqe {
namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '-' || c == '_' || c == '+' || c == '@';
    out += safe ? c : '_';
  }
  return out;
}

std::string log_name(std::string_view system, std::string_view source_lang,
                     std::string_view target_lang) {
  std::ostringstream name;
  // The hash keeps distinct ids that sanitize identically apart.
  name << sanitize(system) << '.' << std::hex << std::setw(8) << std::setfill('0')
       << (random::fnv1a64(system) & 0xffffffffULL) << std::dec << "__" << sanitize(source_lang)
       << '-' << sanitize(target_lang) << ".jsonl";
  return name.str();
}

}  // namespace

std::string content_digest(std::string_view text) {
  const std::string normalized = unicode::nfc(text);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(normalized.data(), normalized.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

TranslationCache::TranslationCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec || !std::filesystem::is_directory(directory_)) {
    mark_degraded("cache directory unavailable (" + directory_.string() + "): " + ec.message());
  }
}

std::filesystem::path TranslationCache::log_path(std::string_view system,
                                                 std::string_view source_lang,
                                                 std::string_view target_lang) const {
  return directory_ / log_name(system, source_lang, target_lang);
}

void TranslationCache::mark_degraded(std::string message) {
  if (!degraded_) warning_ = std::move(message);
  degraded_ = true;
}

bool TranslationCache::degraded() const {
  std::shared_lock lock(mutex_);
  return degraded_;
}

std::string TranslationCache::warning() const {
  std::shared_lock lock(mutex_);
  return warning_;
}

std::size_t TranslationCache::loaded_entries() const {
  std::shared_lock lock(mutex_);
  std::size_t total = 0;
  for (const auto& [name, index] : indexes_) total += index.size();
  return total;
}

TranslationCache::Index& TranslationCache::index_for(const std::string& name,
                                                     std::string_view system,
                                                     std::string_view source_lang,
                                                     std::string_view target_lang) {
  auto it = indexes_.find(name);
  if (it != indexes_.end()) return it->second;
  Index index;
  if (!degraded_) {
    std::ifstream in(directory_ / name, std::ios::binary);
    std::string line;
    while (in && std::getline(in, line)) {
      auto record = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (record.is_discarded() || !record.is_object()) continue;
      if (record.value("system", "") != system || record.value("source_lang", "") != source_lang ||
          record.value("target_lang", "") != target_lang) {
        continue;
      }
      if (!record.contains("digest") || !record.contains("translation")) continue;
      index.emplace(record["digest"].get<std::string>(), record["translation"].get<std::string>());
    }
  }
  return indexes_.emplace(name, std::move(index)).first->second;
}

std::optional<std::string> TranslationCache::lookup(const CacheKey& key) {
  const std::string name = log_name(key.system, key.source_lang, key.target_lang);
  {
    std::shared_lock lock(mutex_);
    auto it = indexes_.find(name);
    if (it != indexes_.end()) {
      auto hit = it->second.find(key.digest);
      if (hit == it->second.end()) return std::nullopt;
      return hit->second;
    }
  }
  std::unique_lock lock(mutex_);
  Index& index = index_for(name, key.system, key.source_lang, key.target_lang);
  auto hit = index.find(key.digest);
  if (hit == index.end()) return std::nullopt;
  return hit->second;
}

void TranslationCache::store(
    std::string_view system, std::string_view source_lang, std::string_view target_lang,
    std::span<const std::pair<std::string, std::string>> digest_translation) {
  std::unique_lock lock(mutex_);
  const std::string name = log_name(system, source_lang, target_lang);
  Index& index = index_for(name, system, source_lang, target_lang);

  std::string buffer;
  const std::string created_at = utc_timestamp();
  for (const auto& [digest, translation] : digest_translation) {
    if (!index.emplace(digest, translation).second) continue;
    nlohmann::json record = {{"system", system},           {"source_lang", source_lang},
                             {"target_lang", target_lang}, {"digest", digest},
                             {"translation", translation}, {"created_at", created_at}};
    buffer += record.dump();
    buffer += '\n';
  }
  if (buffer.empty() || degraded_) return;

  // Terminate a torn final line so the new records start on their own.
  {
    std::ifstream tail(directory_ / name, std::ios::binary | std::ios::ate);
    if (tail && tail.tellg() > 0) {
      tail.seekg(-1, std::ios::end);
      if (tail.get() != '\n') buffer.insert(buffer.begin(), '\n');
    }
  }
  std::ofstream out(directory_ / name, std::ios::binary | std::ios::app);
  out << buffer;
  out.flush();
  if (!out) mark_degraded("cannot append to cache log " + (directory_ / name).string());
}

CachedTranslation cached_translate(TranslationCache* cache, const Translator& translator,
                                   std::span<const std::string> texts,
                                   std::string_view source_lang, std::string_view target_lang,
                                   const TranslateOptions& options) {
  const std::string system = translator.cache_key();
  CachedTranslation result;
  result.texts.resize(texts.size());

  // Distinct misses in first-occurrence order, and the positions they fill.
  std::vector<std::string> miss_texts;
  std::vector<std::string> miss_digests;
  std::unordered_map<std::string, std::size_t> miss_slot;
  std::vector<std::size_t> slot_of(texts.size(), SIZE_MAX);

  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string digest = content_digest(texts[i]);
    if (cache) {
      if (auto hit = cache->lookup({system, std::string(source_lang), std::string(target_lang), digest})) {
        result.texts[i] = std::move(*hit);
        ++result.hits;
        continue;
      }
    }
    auto [it, inserted] = miss_slot.emplace(digest, miss_texts.size());
    if (inserted) {
      miss_texts.push_back(texts[i]);
      miss_digests.push_back(std::move(digest));
    }
    slot_of[i] = it->second;
  }
  result.forwarded = miss_texts.size();

  std::vector<std::string> translated(miss_texts.size());
  if (!miss_texts.empty()) {
    const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
    const std::size_t batches = (miss_texts.size() + batch_size - 1) / batch_size;
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::optional<std::size_t> failed_batch;
    std::string failure_message;

    auto worker = [&] {
      while (true) {
        const std::size_t batch = next++;
        if (batch >= batches) return;
        const std::size_t begin = batch * batch_size;
        const std::size_t end = std::min(miss_texts.size(), begin + batch_size);
        try {
          std::vector<std::string> out = translator.translate(
              std::span<const std::string>(miss_texts).subspan(begin, end - begin), source_lang,
              target_lang);
          if (out.size() != end - begin) {
            throw TranslatorError("translator " + system + " returned " +
                                  std::to_string(out.size()) + " outputs for " +
                                  std::to_string(end - begin) + " inputs");
          }
          std::vector<std::pair<std::string, std::string>> records;
          records.reserve(out.size());
          for (std::size_t j = 0; j < out.size(); ++j) {
            records.emplace_back(miss_digests[begin + j], out[j]);
            translated[begin + j] = std::move(out[j]);
          }
          if (cache) cache->store(system, source_lang, target_lang, records);
        } catch (const std::exception& e) {
          std::lock_guard lock(failure_mutex);
          if (!failed_batch || batch < *failed_batch) {
            failed_batch = batch;
            failure_message = e.what();
          }
        }
      }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.concurrency, 1, batches);
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    if (failed_batch) {
      throw TranslatorError("translation batch " + std::to_string(*failed_batch) + " (" + system +
                                ", " + std::string(source_lang) + "->" +
                                std::string(target_lang) + ") failed: " + failure_message,
                            *failed_batch);
    }
  }

  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (slot_of[i] != SIZE_MAX) result.texts[i] = translated[slot_of[i]];
  }
  result.cache_degraded = cache && cache->degraded();
  return result;
}

}  // namespace rttqe
