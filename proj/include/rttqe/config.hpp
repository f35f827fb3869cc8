#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rttqe/provenance.hpp"
#include "rttqe/rtt.hpp"
#include "rttqe/textmetrics.hpp"
#include "rttqe/translator.hpp"

namespace rttqe {

/// Defaults for HTTP-backed systems; each system may override any field.
struct TranslatorSettings {
  std::string endpoint;
  std::string path = "/translate";
  std::string auth_env;
  std::size_t batch_size = 32;
  std::size_t concurrency = 4;
  std::int64_t timeout_ms = 30000;
  int max_retries = 3;
  std::int64_t backoff_ms = 200;
};

/// A named translation system. Types: identity, reverse-words, cipher,
/// dropout (needs `base` and `rate`), http.
struct SystemConfig {
  std::string name;
  std::string type;
  std::string base;
  double rate = 0.0;
  /// Sub-seed name for dropout draws; defaults to the system name. Systems
  /// sharing a seed name remove nested token sets as the rate grows.
  std::string seed_name;
  std::optional<std::string> endpoint;
  std::optional<std::string> path;
  std::optional<std::string> auth_env;
};

/// Run configuration, read from a JSON file with flag overrides merged on
/// top. Keys: seed, cache_dir, metrics, aggregation, smoothing
/// {mode, value}, spbleu_vocab, translator {...}, systems {name: {...}}.
class RunConfig {
 public:
  RunConfig() : RunConfig(nlohmann::json::object()) {}
  explicit RunConfig(const nlohmann::json& json);

  /// `path` may be empty for an all-defaults config.
  static RunConfig load(const std::filesystem::path& path,
                        const nlohmann::json& overrides = nlohmann::json::object());

  std::optional<std::uint64_t> seed;
  std::filesystem::path cache_dir = ".rttqe-cache";
  bool use_cache = true;
  std::vector<std::string> metrics = {"bleu-13a", "chrf"};
  Aggregation aggregation = Aggregation::corpus;
  Smoothing smoothing{};
  std::string spbleu_vocab;
  TranslatorSettings translator;
  std::map<std::string, SystemConfig> systems;

  /// Effective configuration as canonical JSON (sorted keys).
  nlohmann::json to_json() const;
  /// SHA-256 of the canonical JSON.
  std::string digest() const;
  Provenance provenance() const { return {kToolVersion, digest()}; }

  TranslateOptions translate_options() const {
    return {translator.batch_size, translator.concurrency};
  }

  /// Configured metrics with the configured aggregation and smoothing.
  std::vector<Metric> make_metrics() const;

 private:
  void validate() const;
};

/// Builds translators for configured systems (plus the built-in
/// "identity", "reverse-words" and "cipher"), memoized by name.
class SystemRegistry {
 public:
  explicit SystemRegistry(const RunConfig& config) : config_(config) {}

  TranslatorPtr get(const std::string& name);
  /// Same translator wrapped in a shared call counter.
  void enable_counting() { counting_ = true; }
  std::size_t calls() const;

 private:
  TranslatorPtr build(const std::string& name, int depth);

  const RunConfig& config_;
  std::mutex mutex_;
  std::map<std::string, TranslatorPtr> built_;
  std::vector<std::shared_ptr<const CountingTranslator>> counters_;
  bool counting_ = false;
};

/// The 17 pseudo-competitor systems: dropout over `base` at rates
/// 0.00, 0.05, ..., 0.80, all sharing one seed name.
std::vector<SystemConfig> synthetic_competitors(const std::string& base,
                                                const std::string& seed_name = "synthetic-competitors");

nlohmann::json to_json(const SystemConfig& system);

}  // namespace rttqe
