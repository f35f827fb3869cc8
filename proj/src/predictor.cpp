#include "rttqe/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"
#include "rttqe/linalg.hpp"
#include "rttqe/random.hpp"

namespace rttqe {

using nlohmann::json;

namespace {

std::string kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::self_score: return "self_score";
    case FeatureKind::max4_count: return "max4_count";
    case FeatureKind::ref_length: return "ref_length";
  }
  return "?";
}

FeatureKind parse_kind(std::string_view text) {
  if (text == "self_score" || text == "self") return FeatureKind::self_score;
  if (text == "max4_count" || text == "max4") return FeatureKind::max4_count;
  if (text == "ref_length" || text == "ref_len") return FeatureKind::ref_length;
  throw ValidationError("unknown feature kind: " + std::string(text));
}

bool allowed(DirectionMode mode, Direction direction) {
  switch (mode) {
    case DirectionMode::both: return direction != Direction::forward;
    case DirectionMode::ab_only: return direction == Direction::self_ab;
    case DirectionMode::ba_only: return direction == Direction::self_ba;
  }
  return false;
}

void require_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw ValidationError("non-finite value in " + what);
}

}  // namespace

std::string Feature::name() const {
  return kind_name(kind) + "(" + to_string(direction) + "," + metric + ")";
}

Feature Feature::parse(std::string_view text) {
  Feature feature;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    const auto comma = text.find(',', open);
    if (comma == std::string_view::npos || text.back() != ')') {
      throw ValidationError("malformed feature name: " + std::string(text));
    }
    feature.kind = parse_kind(text.substr(0, open));
    feature.direction = parse_direction(text.substr(open + 1, comma - open - 1));
    feature.metric = std::string(text.substr(comma + 1, text.size() - comma - 2));
  } else {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw ValidationError("malformed feature name: " + std::string(text));
    }
    const std::string_view head = text.substr(0, colon);
    const auto underscore = head.rfind('_');
    if (underscore == std::string_view::npos) {
      throw ValidationError("malformed feature name: " + std::string(text));
    }
    const std::string_view tag = head.substr(underscore + 1);
    if (tag == "ab") feature.direction = Direction::self_ab;
    else if (tag == "ba") feature.direction = Direction::self_ba;
    else throw ValidationError("feature direction must be _ab or _ba: " + std::string(text));
    feature.kind = parse_kind(head.substr(0, underscore));
    feature.metric = std::string(text.substr(colon + 1));
  }
  if (feature.metric.empty()) throw ValidationError("feature without metric: " + std::string(text));
  if (feature.direction == Direction::forward) {
    throw ValidationError("features must come from round-trip records: " + std::string(text));
  }
  return feature;
}

std::string to_string(DirectionMode mode) {
  switch (mode) {
    case DirectionMode::both: return "both";
    case DirectionMode::ab_only: return "A⟲B";
    case DirectionMode::ba_only: return "B⟲A";
  }
  return "?";
}

DirectionMode parse_direction_mode(std::string_view text) {
  if (text == "both") return DirectionMode::both;
  if (text == "A⟲B" || text == "A@B" || text == "ab") return DirectionMode::ab_only;
  if (text == "B⟲A" || text == "B@A" || text == "ba") return DirectionMode::ba_only;
  throw ValidationError("unknown direction mode: " + std::string(text));
}

FeatureSpec::FeatureSpec(std::vector<Feature> features, DirectionMode mode)
    : features_(std::move(features)), mode_(mode) {
  if (features_.empty()) throw ValidationError("feature spec must not be empty");
  std::set<std::string> seen;
  for (const auto& feature : features_) {
    if (!seen.insert(feature.name()).second) {
      throw ValidationError("duplicate feature " + feature.name());
    }
    if (!allowed(mode_, feature.direction)) {
      throw ValidationError("feature " + feature.name() + " not allowed in direction mode " +
                            to_string(mode_));
    }
  }
}

FeatureSpec FeatureSpec::self_scores(const std::string& metric, DirectionMode mode) {
  std::vector<Feature> features;
  if (mode != DirectionMode::ba_only)
    features.push_back({FeatureKind::self_score, Direction::self_ab, metric});
  if (mode != DirectionMode::ab_only)
    features.push_back({FeatureKind::self_score, Direction::self_ba, metric});
  return FeatureSpec(std::move(features), mode);
}

FeatureSpec FeatureSpec::with_aux(const std::string& metric) {
  std::vector<Feature> features;
  for (FeatureKind kind : {FeatureKind::self_score, FeatureKind::max4_count, FeatureKind::ref_length}) {
    for (Direction direction : {Direction::self_ab, Direction::self_ba}) {
      features.push_back({kind, direction, metric});
    }
  }
  return FeatureSpec(std::move(features), DirectionMode::both);
}

std::vector<std::string> FeatureSpec::names() const {
  std::vector<std::string> out;
  for (const auto& feature : features_) out.push_back(feature.name());
  return out;
}

FeatureBuildResult build_features(const std::vector<ScoreRecord>& records, const FeatureSpec& spec,
                                  const std::optional<std::string>& target_metric) {
  using GroupKey = std::pair<LanguagePair, std::string>;
  using SlotKey = std::pair<Direction, std::string>;
  std::map<GroupKey, std::map<SlotKey, std::vector<const ScoreRecord*>>> groups;
  for (const auto& record : records) {
    groups[{record.language_pair, record.system}][{record.direction, record.metric.key()}]
        .push_back(&record);
  }

  FeatureBuildResult result;
  for (const auto& [key, slots] : groups) {
    const std::string tag = key.first.str() + "/" + key.second;
    auto find_one = [&](Direction direction, const std::string& metric,
                        const std::string& what) -> const ScoreRecord* {
      auto it = slots.find({direction, metric});
      if (it == slots.end()) {
        result.diagnostics.push_back(tag + ": missing " + what + ", pair rejected");
        return nullptr;
      }
      if (it->second.size() > 1) {
        result.diagnostics.push_back(tag + ": " + std::to_string(it->second.size()) +
                                     " records for " + what + ", pair rejected");
        return nullptr;
      }
      return it->second.front();
    };

    TrainingSample sample;
    sample.pair = key.first;
    sample.system = key.second;
    bool complete = true;
    for (const auto& feature : spec.features()) {
      const ScoreRecord* record = find_one(feature.direction, feature.metric, feature.name());
      if (!record) {
        complete = false;
        break;
      }
      if (feature.kind == FeatureKind::self_score) {
        sample.features.push_back(record->score);
      } else if (!record->aux) {
        result.diagnostics.push_back(tag + ": record for " + feature.name() +
                                     " has no BLEU statistics, pair rejected");
        complete = false;
        break;
      } else {
        sample.features.push_back(static_cast<double>(
            feature.kind == FeatureKind::max4_count ? record->aux->max4_count
                                                    : record->aux->ref_length));
      }
    }
    if (!complete) continue;
    if (target_metric) {
      const std::string what = "target Trans-Score(" + to_string(Direction::forward) + "," +
                               *target_metric + ")";
      auto it = slots.find({Direction::forward, *target_metric});
      if (it != slots.end() && it->second.size() == 1) {
        sample.target = it->second.front()->score;
      } else if (it != slots.end()) {
        result.diagnostics.push_back(tag + ": " + std::to_string(it->second.size()) +
                                     " records for " + what + ", pair rejected");
        continue;
      }
    }
    result.samples.push_back(std::move(sample));
  }
  return result;
}

LinearPredictor fit_ols(const std::vector<TrainingSample>& samples, const FeatureSpec& spec,
                        std::string target_metric, const FitOptions& options) {
  if (samples.empty()) throw ValidationError("cannot fit a predictor on zero samples");
  const std::size_t p = spec.size();
  std::vector<double> targets;
  std::set<std::string> pairs;
  for (const auto& sample : samples) {
    if (sample.features.size() != p) {
      throw ValidationError("sample " + sample.pair.str() + " has " +
                            std::to_string(sample.features.size()) + " features, spec has " +
                            std::to_string(p));
    }
    if (!sample.target) throw ValidationError("sample " + sample.pair.str() + " has no target");
    for (double x : sample.features) require_finite(x, "features of " + sample.pair.str());
    require_finite(*sample.target, "target of " + sample.pair.str());
    targets.push_back(*sample.target);
    pairs.insert(sample.pair.str());
  }

  std::optional<Standardization> standardization;
  if (options.standardize) {
    Standardization z;
    z.mean.assign(p, 0.0);
    z.scale.assign(p, 0.0);
    const auto k = static_cast<double>(samples.size());
    for (const auto& s : samples)
      for (std::size_t j = 0; j < p; ++j) z.mean[j] += s.features[j] / k;
    for (const auto& s : samples)
      for (std::size_t j = 0; j < p; ++j) {
        const double d = s.features[j] - z.mean[j];
        z.scale[j] += d * d / k;
      }
    for (double& scale : z.scale) scale = scale > 0.0 ? std::sqrt(scale) : 1.0;
    standardization = std::move(z);
  }

  linalg::Matrix design(samples.size(), p + 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double x = samples[i].features[j];
      if (standardization) x = (x - standardization->mean[j]) / standardization->scale[j];
      design(i, j) = x;
    }
    design(i, p) = 1.0;
  }
  const linalg::LeastSquaresSolution solution = linalg::least_squares(design, targets);

  LinearPredictor model{std::move(target_metric),
                        spec,
                        std::vector<double>(solution.coefficients.begin(),
                                            solution.coefficients.begin() + p),
                        solution.coefficients[p],
                        std::move(standardization),
                        {samples.size(), {pairs.begin(), pairs.end()}, options.created_at},
                        {}};
  return model;
}

Prediction predict(const LinearPredictor& model, std::span<const double> features, bool clamp) {
  if (features.size() != model.weights.size()) {
    throw ValidationError("feature layout mismatch: model expects " +
                          std::to_string(model.weights.size()) + " features, got " +
                          std::to_string(features.size()));
  }
  double value = model.intercept;
  for (std::size_t j = 0; j < features.size(); ++j) {
    double x = features[j];
    if (model.standardization) {
      x = (x - model.standardization->mean[j]) / model.standardization->scale[j];
    }
    value += model.weights[j] * x;
  }
  Prediction prediction{value, false};
  if (clamp) {
    prediction.value = std::clamp(value, 0.0, 100.0);
    prediction.clamped = prediction.value != value;
  }
  return prediction;
}

double residual_sum_of_squares(const LinearPredictor& model,
                               const std::vector<TrainingSample>& samples) {
  double rss = 0.0;
  for (const auto& sample : samples) {
    if (!sample.target) continue;
    const double residual = *sample.target - predict(model, sample.features).value;
    rss += residual * residual;
  }
  return rss;
}

std::string exact_decimal(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buffer, end);
}

double parse_exact_decimal(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError("not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

json decimal_array(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(exact_decimal(v));
  return out;
}

std::vector<double> parse_decimal_array(const json& values, const std::string& field) {
  if (!values.is_array()) throw ValidationError("model field '" + field + "' must be an array");
  std::vector<double> out;
  for (const auto& v : values) {
    out.push_back(v.is_string() ? parse_exact_decimal(v.get<std::string>()) : v.get<double>());
  }
  return out;
}

}  // namespace

json model_to_json(const LinearPredictor& model) {
  json out = {
      {"format_version", kModelFormatVersion},
      {"target_metric", model.target_metric},
      {"feature_names", model.spec.names()},
      {"direction_mode", to_string(model.spec.mode())},
      {"weights", decimal_array(model.weights)},
      {"intercept", exact_decimal(model.intercept)},
      {"training",
       {{"n_samples", model.training.n_samples},
        {"language_pairs", model.training.language_pairs},
        {"created_at", model.training.created_at}}},
      {"tool_version", model.provenance.tool_version},
      {"config_digest", model.provenance.config_digest},
  };
  if (model.standardization) {
    out["standardization"] = {{"mean", decimal_array(model.standardization->mean)},
                              {"scale", decimal_array(model.standardization->scale)}};
  }
  return out;
}

LinearPredictor model_from_json(const json& j) {
  try {
    const std::string version = j.at("format_version").get<std::string>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model format_version '" + version + "' (expected '" +
                            kModelFormatVersion + "')");
    }
    std::vector<Feature> features;
    for (const auto& name : j.at("feature_names")) {
      features.push_back(Feature::parse(name.get<std::string>()));
    }
    const DirectionMode mode = parse_direction_mode(j.value("direction_mode", "both"));
    FeatureSpec spec(std::move(features), mode);
    std::vector<double> weights = parse_decimal_array(j.at("weights"), "weights");
    if (weights.size() != spec.size()) {
      throw ValidationError("model declares " + std::to_string(spec.size()) +
                            " feature names but " + std::to_string(weights.size()) + " weights");
    }
    const json& intercept = j.at("intercept");
    LinearPredictor model{
        j.at("target_metric").get<std::string>(),
        std::move(spec),
        std::move(weights),
        intercept.is_string() ? parse_exact_decimal(intercept.get<std::string>())
                              : intercept.get<double>(),
        std::nullopt,
        {},
        {j.value("tool_version", ""), j.value("config_digest", "")}};
    if (j.contains("standardization") && !j["standardization"].is_null()) {
      Standardization z{parse_decimal_array(j["standardization"].at("mean"), "mean"),
                        parse_decimal_array(j["standardization"].at("scale"), "scale")};
      if (z.mean.size() != model.weights.size() || z.scale.size() != model.weights.size()) {
        throw ValidationError("standardization length does not match feature count");
      }
      model.standardization = std::move(z);
    }
    if (j.contains("training")) {
      const json& t = j["training"];
      model.training.n_samples = t.value("n_samples", std::size_t{0});
      model.training.language_pairs =
          t.value("language_pairs", std::vector<std::string>{});
      model.training.created_at = t.value("created_at", "");
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const LinearPredictor& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw ValidationError("write failed: " + path.string());
}

LinearPredictor load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  const json parsed = json::parse(in, nullptr, false);
  if (parsed.is_discarded()) throw ValidationError(path.string() + ": invalid JSON");
  return model_from_json(parsed);
}

std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> train_test_split(
    const std::vector<TrainingSample>& samples, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw ValidationError("test fraction must lie in [0, 1]");
  }
  std::set<LanguagePair> unique;
  for (const auto& s : samples) unique.insert(s.pair);
  std::vector<LanguagePair> pairs(unique.begin(), unique.end());
  std::mt19937_64 rng(seed);
  const auto order = random::permutation(rng, pairs.size());
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(pairs.size())));
  std::set<LanguagePair> test_pairs;
  for (std::size_t i = 0; i < n_test; ++i) test_pairs.insert(pairs[order[i]]);

  std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> split;
  for (const auto& s : samples) {
    (test_pairs.contains(s.pair) ? split.second : split.first).push_back(s);
  }
  return split;
}

}  // namespace rttqe
