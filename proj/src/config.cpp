#include "rttqe/config.hpp"

#include <fstream>

#include "rttqe/error.hpp"
#include "rttqe/http_translator.hpp"
#include "rttqe/random.hpp"
#include "rttqe/subword.hpp"
#include "rttqe/translation_cache.hpp"

namespace rttqe {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return get_or<std::string>(j, key, "");
}

}  // namespace

RunConfig::RunConfig(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0) {
      throw ValidationError("config seed must be a non-negative integer");
    }
    seed = j["seed"].get<std::uint64_t>();
  }
  cache_dir = get_or<std::string>(j, "cache_dir", cache_dir.string());
  use_cache = get_or<bool>(j, "use_cache", use_cache);
  metrics = get_or<std::vector<std::string>>(j, "metrics", metrics);
  aggregation = parse_aggregation(get_or<std::string>(j, "aggregation", to_string(aggregation)));
  if (j.contains("smoothing")) {
    const json& s = j["smoothing"];
    if (s.is_string()) {
      smoothing.mode = parse_smoothing_mode(s.get<std::string>());
      smoothing.value = smoothing.mode == SmoothingMode::add_k ? 1.0 : 0.1;
    } else if (s.is_object()) {
      smoothing.mode = parse_smoothing_mode(get_or<std::string>(s, "mode", "floor"));
      smoothing.value = get_or<double>(s, "value", smoothing.mode == SmoothingMode::add_k ? 1.0 : 0.1);
    } else {
      throw ValidationError("config 'smoothing' must be a string or object");
    }
    if (smoothing.mode == SmoothingMode::none) smoothing.value = 0.0;
  }
  spbleu_vocab = get_or<std::string>(j, "spbleu_vocab", "");

  if (j.contains("translator")) {
    const json& t = j["translator"];
    if (!t.is_object()) throw ValidationError("config 'translator' must be an object");
    translator.endpoint = get_or<std::string>(t, "endpoint", translator.endpoint);
    translator.path = get_or<std::string>(t, "path", translator.path);
    translator.auth_env = get_or<std::string>(t, "auth_env", translator.auth_env);
    translator.batch_size = get_or<std::size_t>(t, "batch_size", translator.batch_size);
    translator.concurrency = get_or<std::size_t>(t, "concurrency", translator.concurrency);
    translator.timeout_ms = get_or<std::int64_t>(t, "timeout_ms", translator.timeout_ms);
    translator.max_retries = get_or<int>(t, "max_retries", translator.max_retries);
    translator.backoff_ms = get_or<std::int64_t>(t, "backoff_ms", translator.backoff_ms);
  }

  if (j.contains("systems")) {
    const json& s = j["systems"];
    if (!s.is_object()) throw ValidationError("config 'systems' must be an object");
    for (const auto& [name, body] : s.items()) {
      if (!body.is_object()) throw ValidationError("system '" + name + "' must be an object");
      SystemConfig system;
      system.name = name;
      system.type = get_or<std::string>(body, "type", "");
      system.base = get_or<std::string>(body, "base", "");
      system.rate = get_or<double>(body, "rate", 0.0);
      system.seed_name = get_or<std::string>(body, "seed_name", "");
      system.endpoint = optional_string(body, "endpoint");
      system.path = optional_string(body, "path");
      system.auth_env = optional_string(body, "auth_env");
      systems.emplace(name, std::move(system));
    }
  }
  validate();
}

void RunConfig::validate() const {
  if (translator.batch_size == 0) throw ValidationError("translator.batch_size must be positive");
  if (translator.concurrency == 0) throw ValidationError("translator.concurrency must be positive");
  if (translator.max_retries < 0) throw ValidationError("translator.max_retries must be >= 0");
  for (const auto& metric : metrics) parse_metric_name(metric);
  bool stochastic = false;
  for (const auto& [name, system] : systems) {
    if (system.type == "dropout") {
      stochastic = true;
      if (system.base.empty()) throw ValidationError("dropout system '" + name + "' needs a base");
      if (!(system.rate >= 0.0 && system.rate <= 1.0)) {
        throw ValidationError("dropout system '" + name + "' rate must lie in [0, 1]");
      }
    } else if (system.type == "http") {
      if (!system.endpoint && translator.endpoint.empty()) {
        throw ValidationError("http system '" + name + "' has no endpoint");
      }
    } else if (system.type != "identity" && system.type != "reverse-words" &&
               system.type != "cipher") {
      throw ValidationError("system '" + name + "' has unknown type '" + system.type + "'");
    }
  }
  if (stochastic && !seed) {
    throw ValidationError("config defines dropout systems but no seed");
  }
}

RunConfig RunConfig::load(const std::filesystem::path& path, const json& overrides) {
  json base = json::object();
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path.string());
    base = json::parse(in, nullptr, false);
    if (base.is_discarded()) throw ValidationError(path.string() + ": invalid JSON");
  }
  if (!base.is_object()) throw ValidationError("config must be a JSON object");
  base.merge_patch(overrides);
  return RunConfig(base);
}

json to_json(const SystemConfig& system) {
  json out = {{"type", system.type}};
  if (!system.base.empty()) out["base"] = system.base;
  if (system.type == "dropout") out["rate"] = system.rate;
  if (!system.seed_name.empty()) out["seed_name"] = system.seed_name;
  if (system.endpoint) out["endpoint"] = *system.endpoint;
  if (system.path) out["path"] = *system.path;
  if (system.auth_env) out["auth_env"] = *system.auth_env;
  return out;
}

json RunConfig::to_json() const {
  json systems_json = json::object();
  for (const auto& [name, system] : systems) systems_json[name] = rttqe::to_json(system);
  json out = {
      {"seed", seed ? json(*seed) : json(nullptr)},
      {"cache_dir", cache_dir.string()},
      {"use_cache", use_cache},
      {"metrics", metrics},
      {"aggregation", to_string(aggregation)},
      {"smoothing", {{"mode", to_string(smoothing.mode)}, {"value", smoothing.value}}},
      {"spbleu_vocab", spbleu_vocab},
      {"translator",
       {{"endpoint", translator.endpoint},
        {"path", translator.path},
        {"auth_env", translator.auth_env},
        {"batch_size", translator.batch_size},
        {"concurrency", translator.concurrency},
        {"timeout_ms", translator.timeout_ms},
        {"max_retries", translator.max_retries},
        {"backoff_ms", translator.backoff_ms}}},
      {"systems", systems_json},
  };
  return out;
}

std::string RunConfig::digest() const { return content_digest(to_json().dump()); }

std::vector<Metric> RunConfig::make_metrics() const {
  std::shared_ptr<const SubwordVocabulary> vocabulary;
  if (!spbleu_vocab.empty()) {
    vocabulary = std::make_shared<const SubwordVocabulary>(SubwordVocabulary::load(spbleu_vocab));
  }
  std::vector<Metric> out;
  for (const auto& name : metrics) {
    switch (parse_metric_name(name)) {
      case MetricName::bleu_13a:
        out.emplace_back(MetricId::bleu_13a(aggregation, smoothing));
        break;
      case MetricName::spbleu:
        out.emplace_back(MetricId::spbleu(aggregation, smoothing), vocabulary);
        break;
      case MetricName::chrf:
        out.emplace_back(MetricId::chrf(aggregation));
        break;
      case MetricName::external:
        throw ValidationError("external metrics are ingested from records, not computed");
    }
  }
  return out;
}

TranslatorPtr SystemRegistry::get(const std::string& name) {
  std::lock_guard lock(mutex_);
  if (auto it = built_.find(name); it != built_.end()) return it->second;
  TranslatorPtr translator = build(name, 0);
  if (counting_) {
    auto counter = std::make_shared<const CountingTranslator>(translator);
    counters_.push_back(counter);
    translator = counter;
  }
  built_.emplace(name, translator);
  return translator;
}

std::size_t SystemRegistry::calls() const {
  std::size_t total = 0;
  for (const auto& counter : counters_) total += counter->calls();
  return total;
}

TranslatorPtr SystemRegistry::build(const std::string& name, int depth) {
  if (depth > 16) throw ValidationError("system '" + name + "': base chain too deep or cyclic");
  auto it = config_.systems.find(name);
  if (it == config_.systems.end()) {
    if (name == "identity") return std::make_shared<IdentityTranslator>();
    if (name == "reverse-words") return std::make_shared<ReverseWordsTranslator>();
    if (name == "cipher") return std::make_shared<CipherTranslator>();
    throw ValidationError("unknown system '" + name + "'");
  }
  const SystemConfig& system = it->second;
  if (system.type == "identity") return std::make_shared<IdentityTranslator>(name);
  if (system.type == "reverse-words") return std::make_shared<ReverseWordsTranslator>(name);
  if (system.type == "cipher") return std::make_shared<CipherTranslator>(name);
  if (system.type == "dropout") {
    TranslatorPtr base = build(system.base, depth + 1);
    const std::string& seed_name = system.seed_name.empty() ? name : system.seed_name;
    return std::make_shared<DropoutTranslator>(base, system.rate,
                                               random::derive_seed(*config_.seed, seed_name), name);
  }
  HttpTranslatorConfig http;
  http.system_id = name;
  http.endpoint = system.endpoint.value_or(config_.translator.endpoint);
  http.path = system.path.value_or(config_.translator.path);
  http.auth_env = system.auth_env.value_or(config_.translator.auth_env);
  http.timeout = std::chrono::milliseconds(config_.translator.timeout_ms);
  http.max_retries = config_.translator.max_retries;
  http.initial_backoff = std::chrono::milliseconds(config_.translator.backoff_ms);
  return std::make_shared<HttpTranslator>(std::move(http));
}

std::vector<SystemConfig> synthetic_competitors(const std::string& base,
                                                const std::string& seed_name) {
  std::vector<SystemConfig> out;
  for (int step = 0; step <= 16; ++step) {
    SystemConfig system;
    system.rate = step * 5 / 100.0;
    system.name = "drop-" + format_rate(system.rate);
    system.type = "dropout";
    system.base = base;
    system.seed_name = seed_name;
    out.push_back(std::move(system));
  }
  return out;
}

}  // namespace rttqe
