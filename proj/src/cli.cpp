#include "rttqe/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rttqe/analysis.hpp"
#include "rttqe/config.hpp"
#include "rttqe/dataset.hpp"
#include "rttqe/error.hpp"
#include "rttqe/predictor.hpp"
#include "rttqe/rtt.hpp"
#include "rttqe/scoring.hpp"

#ifndef RTTQE_DEFAULT_REGISTRY
#define RTTQE_DEFAULT_REGISTRY "data/flores_ae33_registry.csv"
#endif

namespace rttqe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Flags shared by every subcommand that reads a run config.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  bool no_cache = false;
  std::string metrics;
  std::string aggregation;
  std::string smoothing;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> concurrency;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Run config (JSON)");
    app->add_option("--seed", seed, "Override config seed");
    app->add_option("--cache-dir", cache_dir, "Override translation cache directory");
    app->add_flag("--no-cache", no_cache, "Do not read or write the translation cache");
    app->add_option("--metrics", metrics, "Comma-separated metrics (bleu-13a,spbleu,chrf)");
    app->add_option("--aggregation", aggregation, "corpus-level | sentence-average");
    app->add_option("--smoothing", smoothing, "none | floor | add-k");
    app->add_option("--batch-size", batch_size, "Translator batch size");
    app->add_option("--concurrency", concurrency, "Concurrent translator workers");
  }

  RunConfig load() const {
    json overrides = json::object();
    if (seed) overrides["seed"] = *seed;
    if (!cache_dir.empty()) overrides["cache_dir"] = cache_dir;
    if (no_cache) overrides["use_cache"] = false;
    if (!metrics.empty()) {
      std::vector<std::string> names;
      std::stringstream stream(metrics);
      for (std::string name; std::getline(stream, name, ',');)
        if (!name.empty()) names.push_back(name);
      overrides["metrics"] = names;
    }
    if (!aggregation.empty()) overrides["aggregation"] = aggregation;
    if (!smoothing.empty()) overrides["smoothing"] = smoothing;
    if (batch_size) overrides["translator"]["batch_size"] = *batch_size;
    if (concurrency) overrides["translator"]["concurrency"] = *concurrency;
    return RunConfig::load(config_path, overrides);
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  for (std::string item; std::getline(stream, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '-' || c == '_';
    out += safe ? c : '_';
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed: " + path.string());
}

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::vector<double> read_numbers(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      values.push_back(parse_exact_decimal(line));
    } catch (const ValidationError&) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": not a number");
    }
  }
  return values;
}

std::unique_ptr<TranslationCache> open_cache(const RunConfig& config, std::ostream& err) {
  if (!config.use_cache) return nullptr;
  auto cache = std::make_unique<TranslationCache>(config.cache_dir);
  if (cache->degraded()) err << "warning: " << cache->warning() << " (continuing without cache)\n";
  return cache;
}

void report_cache(const TranslationCache* cache, std::ostream& err) {
  if (cache && cache->degraded()) err << "warning: " << cache->warning() << '\n';
}

struct PredictionRow {
  LanguagePair pair;
  std::string system;
  double predicted = 0.0;
  std::optional<double> truth;
};

std::vector<PredictionRow> read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    const std::string where = path.string() + ":" + std::to_string(number);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(where + ": invalid JSON");
    try {
      PredictionRow row;
      row.pair = {j.at("language_pair").at(0).get<std::string>(),
                  j.at("language_pair").at(1).get<std::string>()};
      row.system = j.at("system").get<std::string>();
      row.predicted = j.at("predicted").get<double>();
      if (j.contains("truth") && !j["truth"].is_null()) row.truth = j["truth"].get<double>();
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct RoundtripArgs {
  ConfigFlags config;
  std::string corpus;
  std::string source_lang;
  std::string pivot_lang;
  std::string forward;
  std::string back;
  std::string out_dir;
};

int cmd_roundtrip(const RoundtripArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  SystemRegistry systems(config);
  systems.enable_counting();
  const TranslatorPtr forward = systems.get(args.forward);
  const TranslatorPtr back = systems.get(args.back);
  auto cache = open_cache(config, err);

  const Corpus corpus = load_corpus(args.corpus, args.source_lang);
  const RoundTripResult result =
      round_trip(corpus.segments, args.source_lang, args.pivot_lang, *forward, *back,
                 {cache.get(), config.translate_options()});

  const fs::path source_path(args.corpus);
  const fs::path dir = args.out_dir.empty() ? source_path.parent_path() : fs::path(args.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = source_path.filename().string() + "." + sanitize_name(args.forward);
  const fs::path forward_path = dir / (stem + "." + args.pivot_lang);
  const fs::path back_path =
      dir / (stem + "." + sanitize_name(args.back) + "." + args.source_lang);
  const fs::path meta_path = dir / (stem + "." + sanitize_name(args.back) + ".meta.json");

  save_corpus({args.pivot_lang, result.forward}, forward_path);
  save_corpus({args.source_lang, result.back}, back_path);
  const Provenance provenance = config.provenance();
  const json meta = {{"source", source_path.filename().string()},
                     {"source_lang", args.source_lang},
                     {"pivot_lang", args.pivot_lang},
                     {"forward_system", result.forward_system},
                     {"back_system", result.back_system},
                     {"segments", result.sources.size()},
                     {"forward_output", forward_path.filename().string()},
                     {"back_output", back_path.filename().string()},
                     {"tool_version", provenance.tool_version},
                     {"config_digest", provenance.config_digest}};
  write_text(meta_path, meta.dump(2) + "\n");

  report_cache(cache.get(), err);
  out << "segments: " << result.sources.size() << '\n'
      << "forward output: " << forward_path.string() << '\n'
      << "round-trip output: " << back_path.string() << '\n'
      << "translator calls: " << systems.calls() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  ConfigFlags config;
  std::vector<std::string> corpora;
  std::string pairs;
  std::string registry;
  std::string pair_type;
  std::string systems;
  std::string back_system;
  std::string out;
  std::string plot_data;
};

std::vector<LanguagePair> select_pairs(const std::string& pairs, const std::string& registry,
                                       const std::string& type) {
  std::vector<LanguagePair> out;
  for (const auto& text : split_list(pairs)) out.push_back(LanguagePair::parse(text));
  if (!type.empty()) {
    const PairPartition partition =
        enumerate_pairs(load_registry(registry.empty() ? RTTQE_DEFAULT_REGISTRY : registry));
    auto add = [&](const std::vector<LanguagePair>& list) { out.insert(out.end(), list.begin(), list.end()); };
    if (type == "1" || type == "I" || type == "all") add(partition.type1);
    if (type == "2" || type == "II" || type == "all") add(partition.type2);
    if (type == "3" || type == "III" || type == "all") add(partition.type3);
    if (type != "1" && type != "I" && type != "2" && type != "II" && type != "3" &&
        type != "III" && type != "all") {
      throw ValidationError("--type must be 1, 2, 3 or all");
    }
  }
  return out;
}

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  SystemRegistry systems(config);
  auto cache = open_cache(config, err);

  ScoreMatrixRequest request;
  request.pairs = select_pairs(args.pairs, args.registry, args.pair_type);
  request.systems = split_list(args.systems);
  if (request.systems.empty()) throw ValidationError("score needs --systems");
  if (!args.back_system.empty()) request.back_system = args.back_system;
  for (const auto& spec : args.corpora) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("--corpus expects LANG=PATH, got '" + spec + "'");
    }
    const std::string lang = spec.substr(0, eq);
    request.corpora.emplace(lang, load_corpus(spec.substr(eq + 1), lang));
  }
  request.metrics = config.make_metrics();

  const TranslatorFactory factory = [&](const std::string& name, const std::string&,
                                        const std::string&) { return systems.get(name); };
  ScoreMatrixResult result =
      score_matrix(request, factory, {cache.get(), config.translate_options()});
  const Provenance provenance = config.provenance();
  for (auto& record : result.records) record.provenance = provenance;
  for (const auto& d : result.diagnostics) err << "note: " << d << '\n';
  report_cache(cache.get(), err);
  if (result.records.empty()) throw ValidationError("no records produced");

  emit(args.out, records_to_jsonl(result.records), out);
  if (!args.plot_data.empty()) write_text(args.plot_data, plot_csv(correlation_report(result.records)));
  if (!args.out.empty() && args.out != "-") {
    out << "wrote " << result.records.size() << " records to " << args.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  ConfigFlags config;
  std::vector<std::string> records;
  std::string features;
  std::string feature_metric;
  bool aux = false;
  std::string direction_mode = "both";
  std::string target;
  bool standardize = false;
  std::string registry;
  std::string pair_type;
  std::string out;
};

FeatureSpec make_spec(const std::string& features, const std::string& metric, bool aux,
                      const std::string& mode_text) {
  const DirectionMode mode = parse_direction_mode(mode_text);
  if (!features.empty()) {
    std::vector<Feature> list;
    for (const auto& name : split_list(features)) list.push_back(Feature::parse(name));
    return FeatureSpec(std::move(list), mode);
  }
  if (metric.empty()) throw ValidationError("give --features or --feature-metric");
  if (aux) {
    if (mode != DirectionMode::both) throw ValidationError("--aux uses both directions");
    return FeatureSpec::with_aux(metric);
  }
  return FeatureSpec::self_scores(metric, mode);
}

std::vector<ScoreRecord> read_all_records(const std::vector<std::string>& paths) {
  std::vector<ScoreRecord> records;
  for (const auto& path : paths) {
    auto part = read_records(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  const std::string target = args.target.empty() ? args.feature_metric : args.target;
  if (target.empty()) throw ValidationError("fit needs --target");
  const FeatureSpec spec = make_spec(args.features, args.feature_metric, args.aux, args.direction_mode);

  FeatureBuildResult built = build_features(read_all_records(args.records), spec, target);
  for (const auto& d : built.diagnostics) err << "note: " << d << '\n';

  std::optional<std::set<LanguagePair>> allowed;
  if (!args.pair_type.empty()) {
    const auto pairs = select_pairs("", args.registry, args.pair_type);
    allowed = std::set<LanguagePair>(pairs.begin(), pairs.end());
  }
  std::vector<TrainingSample> samples;
  for (auto& sample : built.samples) {
    if (allowed && !allowed->contains(sample.pair)) continue;
    if (!sample.target) {
      err << "note: " << sample.pair.str() << "/" << sample.system
          << ": no Trans-Score under " << target << ", not used for training\n";
      continue;
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) throw ValidationError("no usable training samples");

  FitOptions options;
  options.standardize = args.standardize;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) options.created_at = epoch;
  LinearPredictor model = fit_ols(samples, spec, target, options);
  model.provenance = config.provenance();

  if (samples.size() < spec.size() + 1) {
    err << "warning: " << samples.size() << " samples for " << spec.size() + 1
        << " parameters; the fit is underdetermined\n";
  }
  emit(args.out, model_to_json(model).dump(2) + "\n", out);

  if (!args.out.empty() && args.out != "-") {
    out << "samples: " << samples.size() << '\n';
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      out << "  " << spec.features()[j].name() << ": " << exact_decimal(model.weights[j]) << '\n';
    }
    out << "  intercept: " << exact_decimal(model.intercept) << '\n'
        << "RSS: " << residual_sum_of_squares(model, samples) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  ConfigFlags config;
  std::string model;
  std::vector<std::string> records;
  bool clamp = false;
  std::string out;
};

int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  const LinearPredictor model = load_model(args.model);
  const FeatureBuildResult built =
      build_features(read_all_records(args.records), model.spec, model.target_metric);
  for (const auto& d : built.diagnostics) err << "note: " << d << '\n';

  const Provenance provenance = config.provenance();
  std::string lines;
  for (const auto& sample : built.samples) {
    const Prediction prediction = predict(model, sample.features, args.clamp);
    const json line = {{"language_pair", {sample.pair.source, sample.pair.target}},
                       {"system", sample.system},
                       {"target_metric", model.target_metric},
                       {"predicted", prediction.value},
                       {"truth", sample.target ? json(*sample.target) : json(nullptr)},
                       {"clamped", prediction.clamped},
                       {"clamp_enabled", args.clamp},
                       {"tool_version", provenance.tool_version},
                       {"config_digest", provenance.config_digest}};
    lines += line.dump() + "\n";
  }
  emit(args.out, lines, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  ConfigFlags config;
  std::string predictions;
  std::string pred_file;
  std::string truth_file;
  std::vector<std::string> records;
  std::string out;
  std::string plot_data;
};

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  const Provenance provenance = config.provenance();

  if (!args.records.empty()) {
    const CorrelationReport report = correlation_report(read_all_records(args.records));
    for (const auto& d : report.diagnostics) err << "note: " << d << '\n';
    out << to_table(report);
    if (!args.out.empty()) write_text(args.out, to_jsonl(report, provenance));
    if (!args.plot_data.empty()) write_text(args.plot_data, plot_csv(report));
    return kExitOk;
  }

  std::vector<double> predicted;
  std::vector<double> truth;
  std::string scatter = "pair,system,truth,predicted\n";
  if (!args.predictions.empty()) {
    for (const auto& row : read_predictions(args.predictions)) {
      if (!row.truth) {
        err << "note: " << row.pair.str() << "/" << row.system << ": no true score, skipped\n";
        continue;
      }
      predicted.push_back(row.predicted);
      truth.push_back(*row.truth);
      std::ostringstream line;
      line.precision(17);
      line << row.pair.str() << ',' << row.system << ',' << *row.truth << ',' << row.predicted << '\n';
      scatter += line.str();
    }
  } else if (!args.pred_file.empty() && !args.truth_file.empty()) {
    predicted = read_numbers(args.pred_file);
    truth = read_numbers(args.truth_file);
    for (std::size_t i = 0; i < std::min(predicted.size(), truth.size()); ++i) {
      std::ostringstream line;
      line.precision(17);
      line << ',' << i << ',' << truth[i] << ',' << predicted[i] << '\n';
      scatter += line.str();
    }
  } else {
    throw ValidationError("eval needs --predictions, --pred with --truth, or --records");
  }

  const ErrorReport report = error_report(predicted, truth);
  out << to_table(report);
  if (!args.out.empty()) write_text(args.out, to_json(report, provenance).dump(2) + "\n");
  if (!args.plot_data.empty()) write_text(args.plot_data, scatter);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RankArgs {
  ConfigFlags config;
  std::string predictions;
  std::string pair;
  std::string out;
};

int cmd_rank(const RankArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.load();
  const Provenance provenance = config.provenance();
  std::map<LanguagePair, std::vector<SystemEntry>> groups;
  for (const auto& row : read_predictions(args.predictions)) {
    if (!args.pair.empty() && row.pair.str() != args.pair) continue;
    groups[row.pair].push_back({row.system, row.predicted, row.truth});
  }
  if (groups.empty()) throw ValidationError("no predictions to rank");

  std::string lines;
  for (const auto& [pair, entries] : groups) {
    if (entries.size() < 2) {
      err << "note: " << pair.str() << ": only one system, not ranked\n";
      continue;
    }
    const RankingReport report = rank_systems(entries);
    out << "== " << pair.str() << " ==\n" << to_table(report);
    json line = to_json(report, provenance);
    line["language_pair"] = {pair.source, pair.target};
    lines += line.dump() + "\n";
  }
  if (!args.out.empty()) write_text(args.out, lines);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CopyArgs {
  std::string source;
  std::string output;
  bool verbose = false;
};

int cmd_copystats(const CopyArgs& args, std::ostream& out, std::ostream&) {
  const Corpus source = load_corpus(args.source, "src");
  const Corpus output = load_corpus(args.output, "out");
  const CopyStats stats = copy_stats(source.segments, output.segments);
  json result = {{"sentences", stats.sentences},
                 {"avg_copy_count", stats.avg_copy_count},
                 {"avg_copy_pct", stats.avg_copy_pct},
                 {"tool_version", kToolVersion}};
  if (args.verbose) result["avg_copy_pct_of_source"] = stats.avg_copy_pct_of_source;
  out << result.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  ConfigFlags config;
  std::string base = "identity";
  std::string seed_name = "synthetic-competitors";
  std::string out;
};

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream&) {
  json document = json::object();
  if (!args.config.config_path.empty()) {
    std::ifstream in(args.config.config_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + args.config.config_path);
    document = json::parse(in, nullptr, false);
    if (document.is_discarded() || !document.is_object()) {
      throw ValidationError(args.config.config_path + ": invalid JSON object");
    }
  }
  if (args.config.seed) document["seed"] = *args.config.seed;
  if (!document.contains("seed") || document["seed"].is_null()) {
    throw ValidationError("synthetic competitors are stochastic: give --seed or a config seed");
  }
  for (const auto& system : synthetic_competitors(args.base, args.seed_name)) {
    document["systems"][system.name] = to_json(system);
  }
  const RunConfig validated(document);
  emit(args.out, document.dump(2) + "\n", out);
  if (!args.out.empty() && args.out != "-") {
    for (const auto& system : synthetic_competitors(args.base, args.seed_name)) {
      out << system.name << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PartitionArgs {
  std::string registry;
  bool list = false;
  bool as_json = false;
};

int cmd_partition(const PartitionArgs& args, std::ostream& out, std::ostream&) {
  const auto registry = load_registry(args.registry.empty() ? RTTQE_DEFAULT_REGISTRY : args.registry);
  const PairPartition partition = enumerate_pairs(registry);
  if (args.as_json) {
    auto names = [](const std::vector<LanguagePair>& pairs) {
      std::vector<std::string> out;
      for (const auto& p : pairs) out.push_back(p.str());
      return out;
    };
    json result = {{"type1", partition.type1.size()},
                   {"type2", partition.type2.size()},
                   {"type3", partition.type3.size()},
                   {"tool_version", kToolVersion}};
    if (args.list) {
      result["pairs"] = {{"type1", names(partition.type1)},
                         {"type2", names(partition.type2)},
                         {"type3", names(partition.type3)}};
    }
    out << result.dump() << '\n';
    return kExitOk;
  }
  out << "languages: " << registry.size() << '\n'
      << "Type I: " << partition.type1.size() << '\n'
      << "Type II: " << partition.type2.size() << '\n'
      << "Type III: " << partition.type3.size() << '\n'
      << "(" << partition.type1.size() << ", " << partition.type2.size() << ", "
      << partition.type3.size() << ")\n";
  if (args.list) {
    auto print = [&](const char* label, const std::vector<LanguagePair>& pairs) {
      out << label << ':';
      for (const auto& p : pairs) out << ' ' << p.str();
      out << '\n';
    };
    print("type1", partition.type1);
    print("type2", partition.type2);
    print("type3", partition.type3);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-free MT quality estimation from round-trip translation", "rtt-qe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RoundtripArgs roundtrip;
  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "Translate a corpus there and back");
  roundtrip.config.attach(roundtrip_cmd);
  roundtrip_cmd->add_option("--corpus", roundtrip.corpus, "Source corpus")->required();
  roundtrip_cmd->add_option("--src", roundtrip.source_lang, "Source language code")->required();
  roundtrip_cmd->add_option("--pivot", roundtrip.pivot_lang, "Pivot language code")->required();
  roundtrip_cmd->add_option("--fwd", roundtrip.forward, "Forward system")->required();
  roundtrip_cmd->add_option("--back", roundtrip.back, "Backward system")->required();
  roundtrip_cmd->add_option("--out-dir", roundtrip.out_dir, "Output directory (default: next to the corpus)");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute Trans-Score and Self-Score records");
  score.config.attach(score_cmd);
  score_cmd->add_option("--corpus", score.corpora, "LANG=PATH (repeatable)")->required();
  score_cmd->add_option("--pairs", score.pairs, "Comma-separated src-tgt pairs");
  score_cmd->add_option("--registry", score.registry, "Language registry CSV");
  score_cmd->add_option("--type", score.pair_type, "Pair type from the registry: 1, 2, 3, all");
  score_cmd->add_option("--systems", score.systems, "Comma-separated systems to evaluate")->required();
  score_cmd->add_option("--back-system", score.back_system, "Fixed system for the B→A leg");
  score_cmd->add_option("--out", score.out, "Records output (JSONL; default stdout)");
  score_cmd->add_option("--plot-data", score.plot_data, "Write (Trans, Self) scatter CSV");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a linear Trans-Score predictor");
  fit.config.attach(fit_cmd);
  fit_cmd->add_option("--records", fit.records, "Score records (repeatable)")->required();
  fit_cmd->add_option("--features", fit.features, "Comma-separated feature names");
  fit_cmd->add_option("--feature-metric", fit.feature_metric, "Metric for default Self-Score features");
  fit_cmd->add_flag("--aux", fit.aux, "Add max4_count and ref_length features");
  fit_cmd->add_option("--direction-mode", fit.direction_mode, "both | ab | ba");
  fit_cmd->add_option("--target", fit.target, "Target Trans-Score metric");
  fit_cmd->add_flag("--standardize", fit.standardize, "Z-score features before fitting");
  fit_cmd->add_option("--registry", fit.registry, "Registry for --type");
  fit_cmd->add_option("--type", fit.pair_type, "Train only on pairs of this type");
  fit_cmd->add_option("--out", fit.out, "Model output (default stdout)");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict Trans-Scores from Self-Score records");
  predict_args.config.attach(predict_cmd);
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  predict_cmd->add_option("--records", predict_args.records, "Score records (repeatable)")->required();
  predict_cmd->add_flag("--clamp", predict_args.clamp, "Clamp predictions to [0, 100]");
  predict_cmd->add_option("--out", predict_args.out, "Predictions output (JSONL; default stdout)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Error and correlation measurements");
  eval.config.attach(eval_cmd);
  eval_cmd->add_option("--predictions", eval.predictions, "Predictions JSONL with true scores");
  eval_cmd->add_option("--pred", eval.pred_file, "Predicted scores, one per line");
  eval_cmd->add_option("--truth", eval.truth_file, "True scores, one per line");
  eval_cmd->add_option("--records", eval.records, "Score records for a correlation report");
  eval_cmd->add_option("--out", eval.out, "JSON report output");
  eval_cmd->add_option("--plot-data", eval.plot_data, "Write scatter CSV");

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank systems by predicted score");
  rank.config.attach(rank_cmd);
  rank_cmd->add_option("--predictions", rank.predictions, "Predictions JSONL")->required();
  rank_cmd->add_option("--pair", rank.pair, "Only this src-tgt pair");
  rank_cmd->add_option("--out", rank.out, "Ranking reports (JSONL)");

  CopyArgs copy;
  auto* copy_cmd = app.add_subcommand("copystats", "Word-copy statistics of a translation");
  copy_cmd->add_option("--source", copy.source, "Source segments")->required();
  copy_cmd->add_option("--output", copy.output, "Translated segments")->required();
  copy_cmd->add_flag("--verbose", copy.verbose, "Also report the source-token denominator");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Add the 17 dropout pseudo-competitors to a config");
  synth.config.attach(synth_cmd);
  synth_cmd->add_option("--base", synth.base, "System the competitors degrade");
  synth_cmd->add_option("--seed-name", synth.seed_name, "Shared sub-seed name");
  synth_cmd->add_option("--out", synth.out, "Config output (default stdout)");

  PartitionArgs partition;
  auto* partition_cmd = app.add_subcommand("partition", "Type I/II/III language pair counts");
  partition_cmd->add_option("--registry", partition.registry, "Registry CSV (default: bundled)");
  partition_cmd->add_flag("--list", partition.list, "List the pairs");
  partition_cmd->add_flag("--json", partition.as_json, "JSON output");
  // Accepted for a uniform command line; partitioning reads no config.
  std::string unused_config;
  partition_cmd->add_option("--config", unused_config, "Ignored");
  copy_cmd->add_option("--config", unused_config, "Ignored");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*roundtrip_cmd) return cmd_roundtrip(roundtrip, out, err);
    if (*score_cmd) return cmd_score(score, out, err);
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*predict_cmd) return cmd_predict(predict_args, out, err);
    if (*eval_cmd) return cmd_eval(eval, out, err);
    if (*rank_cmd) return cmd_rank(rank, out, err);
    if (*copy_cmd) return cmd_copystats(copy, out, err);
    if (*synth_cmd) return cmd_synth(synth, out, err);
    if (*partition_cmd) return cmd_partition(partition, out, err);
  } catch (const TranslatorError& e) {
    err << "translator error: " << e.what() << '\n';
    return kExitTranslator;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace rttqe
