#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "rttqe/translator.hpp"

namespace rttqe {

struct HttpTranslatorConfig {
  std::string system_id;
  /// scheme://host[:port], e.g. "https://mt.example.com".
  std::string endpoint;
  std::string path = "/translate";
  /// Environment variable holding the bearer token; empty for none.
  std::string auth_env;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
};

/// JSON-over-HTTP adapter.
///
///   POST {path}  {"source_lang": s, "target_lang": t, "texts": [...]}
///   200          {"translations": [...]}   (same length as "texts")
///
/// Transport failures are retried up to max_retries times with exponential
/// backoff; any HTTP status other than 2xx fails immediately.
class HttpTranslator final : public Translator {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpTranslator(HttpTranslatorConfig config, Sleeper sleeper = {});

  std::string id() const override { return config_.system_id; }
  std::vector<std::string> translate(std::span<const std::string> texts,
                                     std::string_view source_lang,
                                     std::string_view target_lang) const override;

  const HttpTranslatorConfig& config() const { return config_; }

 private:
  HttpTranslatorConfig config_;
  Sleeper sleeper_;
};

}  // namespace rttqe
