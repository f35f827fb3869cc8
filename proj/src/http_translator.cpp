#include "rttqe/http_translator.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"

namespace rttqe {

HttpTranslator::HttpTranslator(HttpTranslatorConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.system_id.empty()) throw ValidationError("HTTP translator needs a system id");
  if (config_.endpoint.empty()) throw ValidationError("HTTP translator needs an endpoint");
  if (config_.max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::vector<std::string> HttpTranslator::translate(std::span<const std::string> texts,
                                                   std::string_view source_lang,
                                                   std::string_view target_lang) const {
  if (texts.empty()) return {};

  const nlohmann::json body = {{"source_lang", source_lang},
                               {"target_lang", target_lang},
                               {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    if (const char* token = std::getenv(config_.auth_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  httplib::Client client(config_.endpoint);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  auto backoff = config_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff *= 2;
    }
    httplib::Result response = client.Post(config_.path, headers, payload, "application/json");
    if (!response) {
      last_error = httplib::to_string(response.error());
      continue;
    }
    if (response->status < 200 || response->status >= 300) {
      throw TranslatorError(config_.system_id + ": HTTP " + std::to_string(response->status) +
                            " from " + config_.endpoint + config_.path);
    }
    const auto reply = nlohmann::json::parse(response->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("translations") ||
        !reply["translations"].is_array()) {
      throw TranslatorError(config_.system_id + ": malformed response body");
    }
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& item : reply["translations"]) {
      if (!item.is_string()) throw TranslatorError(config_.system_id + ": non-string translation");
      out.push_back(item.get<std::string>());
    }
    if (out.size() != texts.size()) {
      throw TranslatorError(config_.system_id + ": expected " + std::to_string(texts.size()) +
                            " translations, got " + std::to_string(out.size()));
    }
    return out;
  }
  throw TranslatorError(config_.system_id + ": transport failure after " +
                        std::to_string(config_.max_retries) + " retries: " + last_error);
}

}  // namespace rttqe
