#include "rttqe/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"

namespace rttqe {

using nlohmann::json;

std::string to_string(Direction direction) {
  switch (direction) {
    case Direction::forward: return "A→B";
    case Direction::self_ab: return "A⟲B";
    case Direction::self_ba: return "B⟲A";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == "A→B" || text == "A->B" || text == "forward") return Direction::forward;
  if (text == "A⟲B" || text == "A@B" || text == "self_ab") return Direction::self_ab;
  if (text == "B⟲A" || text == "B@A" || text == "self_ba") return Direction::self_ba;
  throw ValidationError("unknown direction tag: " + std::string(text));
}

bool operator==(const ScoreRecord& a, const ScoreRecord& b) {
  return a.language_pair == b.language_pair && a.system == b.system &&
         a.back_system == b.back_system && a.direction == b.direction && a.metric == b.metric &&
         a.score == b.score && a.aux == b.aux && a.segment_count == b.segment_count &&
         a.degenerate == b.degenerate && a.provenance.tool_version == b.provenance.tool_version &&
         a.provenance.config_digest == b.provenance.config_digest;
}

bool record_less(const ScoreRecord& a, const ScoreRecord& b) {
  if (a.language_pair != b.language_pair) return a.language_pair < b.language_pair;
  if (a.system != b.system) return a.system < b.system;
  if (a.direction != b.direction) return a.direction < b.direction;
  if (a.metric < b.metric) return true;
  if (b.metric < a.metric) return false;
  return a.back_system < b.back_system;
}

json to_json(const ScoreRecord& r) {
  json metric = {{"name", to_string(r.metric.name)},
                 {"max_order", r.metric.max_order},
                 {"beta", r.metric.beta}};
  if (!r.metric.label.empty()) metric["label"] = r.metric.label;
  json out = {
      {"language_pair", {r.language_pair.source, r.language_pair.target}},
      {"system", r.system},
      {"back_system", r.back_system.empty() ? json(nullptr) : json(r.back_system)},
      {"direction", to_string(r.direction)},
      {"metric", metric},
      {"score", r.score},
      {"aggregation", to_string(r.metric.aggregation)},
      {"smoothing", {{"mode", to_string(r.metric.smoothing.mode)}, {"value", r.metric.smoothing.value}}},
      {"segment_count", r.segment_count},
      {"degenerate", r.degenerate},
      {"tool_version", r.provenance.tool_version},
      {"config_digest", r.provenance.config_digest},
  };
  out["aux"] = r.aux ? json{{"max4_count", r.aux->max4_count}, {"ref_length", r.aux->ref_length}}
                     : json(nullptr);
  return out;
}

ScoreRecord record_from_json(const json& j) {
  try {
    ScoreRecord r;
    const auto& pair = j.at("language_pair");
    if (!pair.is_array() || pair.size() != 2) {
      throw ValidationError("language_pair must be a two-element array");
    }
    r.language_pair = {pair[0].get<std::string>(), pair[1].get<std::string>()};
    r.system = j.at("system").get<std::string>();
    if (j.contains("back_system") && !j["back_system"].is_null()) {
      r.back_system = j["back_system"].get<std::string>();
    }
    r.direction = parse_direction(j.at("direction").get<std::string>());

    const auto& metric = j.at("metric");
    r.metric.name = parse_metric_name(metric.at("name").get<std::string>());
    if (r.metric.name == MetricName::external) {
      r.metric = MetricId::external(metric.at("label").get<std::string>());
    } else if (r.metric.name == MetricName::chrf) {
      r.metric = MetricId::chrf();
    }
    r.metric.max_order = metric.value("max_order", r.metric.max_order);
    r.metric.beta = metric.value("beta", r.metric.beta);
    if (j.contains("aggregation")) {
      r.metric.aggregation = parse_aggregation(j["aggregation"].get<std::string>());
    }
    if (j.contains("smoothing") && j["smoothing"].is_object()) {
      r.metric.smoothing.mode = parse_smoothing_mode(j["smoothing"].at("mode").get<std::string>());
      r.metric.smoothing.value = j["smoothing"].value("value", 0.0);
    }
    r.score = j.at("score").get<double>();
    if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 100.0) {
      throw ValidationError("score outside [0, 100]");
    }
    if (j.contains("aux") && j["aux"].is_object()) {
      r.aux = AuxFeatures{j["aux"].at("max4_count").get<std::int64_t>(),
                          j["aux"].at("ref_length").get<std::int64_t>()};
    }
    r.segment_count = j.value("segment_count", std::size_t{0});
    r.degenerate = j.value("degenerate", false);
    r.provenance.tool_version = j.value("tool_version", "");
    r.provenance.config_digest = j.value("config_digest", "");
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed score record: ") + e.what());
  }
}

std::string records_to_jsonl(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<ScoreRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << records_to_jsonl(records);
}

std::vector<ScoreRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<ScoreRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": invalid JSON");
    }
    try {
      records.push_back(record_from_json(parsed));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return records;
}

ScoreRecord make_record(const LanguagePair& pair, std::string system, std::string back_system,
                        Direction direction, const Metric& metric,
                        const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs) {
  const MetricResult result = metric.score(hyps, refs);
  ScoreRecord record;
  record.language_pair = pair;
  record.system = std::move(system);
  record.back_system = std::move(back_system);
  record.direction = direction;
  record.metric = metric.id();
  record.score = result.score;
  if (result.stats) record.aux = feature_stats(*result.stats);
  record.segment_count = result.segments;
  record.degenerate = result.degenerate;
  return record;
}

ScoreRecord trans_score(const Translator& system_ab, const ParallelCorpus& parallel,
                        const Metric& metric, const TranslationContext& context) {
  if (parallel.size() == 0) throw ValidationError("Trans-Score needs a nonempty parallel corpus");
  const auto hyps = cached_translate(context.cache, system_ab, parallel.sources,
                                     parallel.source_lang, parallel.target_lang, context.options)
                        .texts;
  return make_record({parallel.source_lang, parallel.target_lang}, system_ab.id(), "",
                     Direction::forward, metric, hyps, parallel.targets);
}

ScoreRecord self_score(Direction direction, const LanguagePair& pair,
                       const Translator& system_ab, const Translator& system_ba,
                       const Corpus& corpus, const Metric& metric,
                       const TranslationContext& context) {
  if (corpus.empty()) throw ValidationError("Self-Score needs a nonempty corpus");
  RoundTripResult trip;
  if (direction == Direction::self_ab) {
    if (corpus.lang != pair.source) {
      throw ValidationError("A⟲B needs a corpus in " + pair.source + ", got " + corpus.lang);
    }
    trip = round_trip(corpus.segments, pair.source, pair.target, system_ab, system_ba, context);
  } else if (direction == Direction::self_ba) {
    if (corpus.lang != pair.target) {
      throw ValidationError("B⟲A needs a corpus in " + pair.target + ", got " + corpus.lang);
    }
    trip = round_trip(corpus.segments, pair.target, pair.source, system_ba, system_ab, context);
  } else {
    throw ValidationError("self_score takes a round-trip direction");
  }
  return make_record(pair, system_ab.id(), system_ba.id(), direction, metric, trip.back,
                     trip.sources);
}

ScoreMatrixResult score_matrix(const ScoreMatrixRequest& request, const TranslatorFactory& factory,
                               const TranslationContext& context) {
  ScoreMatrixResult result;
  for (const auto& pair : request.pairs) {
    if (pair.source == pair.target) {
      result.diagnostics.push_back(pair.str() + ": source and target language coincide, skipped");
      continue;
    }
    auto corpus_a = request.corpora.find(pair.source);
    auto corpus_b = request.corpora.find(pair.target);
    if (corpus_a == request.corpora.end() || corpus_b == request.corpora.end()) {
      const std::string& missing =
          corpus_a == request.corpora.end() ? pair.source : pair.target;
      result.diagnostics.push_back(pair.str() + ": no corpus for language '" + missing +
                                   "', skipped");
      continue;
    }
    if (corpus_a->second.empty() || corpus_b->second.empty()) {
      result.diagnostics.push_back(pair.str() + ": empty corpus, skipped");
      continue;
    }
    const bool aligned = corpus_a->second.size() == corpus_b->second.size();
    if (!aligned) {
      result.diagnostics.push_back(pair.str() + ": corpora differ in length (" +
                                   std::to_string(corpus_a->second.size()) + ", " +
                                   std::to_string(corpus_b->second.size()) +
                                   "), Trans-Score skipped");
    }

    for (const auto& system : request.systems) {
      const std::string& back_name = request.back_system.value_or(system);
      const TranslatorPtr forward_ab = factory(system, pair.source, pair.target);
      const TranslatorPtr back_ba = factory(back_name, pair.target, pair.source);

      // Translate once per leg and score every metric on the shared output.
      const RoundTripResult trip_a = round_trip(corpus_a->second.segments, pair.source,
                                                pair.target, *forward_ab, *back_ba, context);
      const RoundTripResult trip_b = round_trip(corpus_b->second.segments, pair.target,
                                                pair.source, *back_ba, *forward_ab, context);
      for (const auto& metric : request.metrics) {
        if (aligned) {
          result.records.push_back(make_record(pair, forward_ab->id(), "", Direction::forward,
                                               metric, trip_a.forward,
                                               corpus_b->second.segments));
        }
        result.records.push_back(make_record(pair, forward_ab->id(), back_ba->id(),
                                             Direction::self_ab, metric, trip_a.back,
                                             trip_a.sources));
        result.records.push_back(make_record(pair, forward_ab->id(), back_ba->id(),
                                             Direction::self_ba, metric, trip_b.back,
                                             trip_b.sources));
      }
    }
  }
  std::stable_sort(result.records.begin(), result.records.end(), record_less);
  return result;
}

}  // namespace rttqe
