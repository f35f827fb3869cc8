#pragma once

// Linear Trans-Score predictors over Self-Score features.
//
//   prediction = Σ_j weight_j · feature_j + intercept
//
// fitted by ordinary least squares on (feature row, Trans-Score) samples,
// one sample per (language pair, system).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rttqe/dataset.hpp"
#include "rttqe/provenance.hpp"
#include "rttqe/scoring.hpp"

namespace rttqe {

inline constexpr const char* kModelFormatVersion = "rtt-qe-linear/1";

enum class FeatureKind { self_score, max4_count, ref_length };

/// One regression input, read from the round-trip record of `direction`
/// under metric `metric`.
struct Feature {
  FeatureKind kind = FeatureKind::self_score;
  Direction direction = Direction::self_ab;
  std::string metric;

  /// Canonical form, e.g. "self_score(A⟲B,spbleu)".
  std::string name() const;
  /// Accepts the canonical form, ASCII direction tags ("A@B"), and the
  /// shorthand "self_ab:spbleu", "max4_ba:spbleu", "ref_len_ab:spbleu".
  static Feature parse(std::string_view text);

  friend bool operator==(const Feature&, const Feature&) = default;
};

enum class DirectionMode { both, ab_only, ba_only };

std::string to_string(DirectionMode mode);
DirectionMode parse_direction_mode(std::string_view text);

class FeatureSpec {
 public:
  /// Throws ValidationError if empty, if names repeat, or if a feature
  /// reads a direction the mode excludes.
  FeatureSpec(std::vector<Feature> features, DirectionMode mode = DirectionMode::both);

  /// Self-Scores under `metric` for the directions the mode allows.
  static FeatureSpec self_scores(const std::string& metric, DirectionMode mode = DirectionMode::both);
  /// Self-Scores plus max4_count and ref_length for both directions.
  static FeatureSpec with_aux(const std::string& metric);

  const std::vector<Feature>& features() const { return features_; }
  DirectionMode mode() const { return mode_; }
  std::size_t size() const { return features_.size(); }
  std::vector<std::string> names() const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;

 private:
  std::vector<Feature> features_;
  DirectionMode mode_;
};

struct TrainingSample {
  LanguagePair pair;
  std::string system;
  std::vector<double> features;
  /// Trans-Score under the target metric, when a forward record exists.
  std::optional<double> target;
};

struct FeatureBuildResult {
  std::vector<TrainingSample> samples;
  std::vector<std::string> diagnostics;
};

/// Groups records by (language pair, system) and emits one feature row per
/// group, in spec order. Groups missing any feature are rejected with a
/// diagnostic naming it. When `target_metric` is given, the forward record
/// under that metric supplies the target.
FeatureBuildResult build_features(const std::vector<ScoreRecord>& records, const FeatureSpec& spec,
                                  const std::optional<std::string>& target_metric = std::nullopt);

struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;
};

struct TrainingInfo {
  std::size_t n_samples = 0;
  std::vector<std::string> language_pairs;
  std::string created_at;
};

struct LinearPredictor {
  std::string target_metric;
  FeatureSpec spec;
  std::vector<double> weights;
  double intercept = 0.0;
  /// When present, weights apply to (x − mean) / scale.
  std::optional<Standardization> standardization;
  TrainingInfo training;
  Provenance provenance;
};

struct FitOptions {
  bool standardize = false;
  std::string created_at;
};

/// Least-squares fit of weights and intercept. Rank-deficient designs give
/// the minimum-norm solution of the intercept-augmented system.
LinearPredictor fit_ols(const std::vector<TrainingSample>& samples, const FeatureSpec& spec,
                        std::string target_metric, const FitOptions& options = {});

struct Prediction {
  double value = 0.0;
  bool clamped = false;
};

/// Applies the affine map; with `clamp`, the output is limited to [0, 100]
/// and `clamped` reports whether that changed it.
Prediction predict(const LinearPredictor& model, std::span<const double> features,
                   bool clamp = false);

/// Residual sum of squares over samples that carry a target.
double residual_sum_of_squares(const LinearPredictor& model,
                               const std::vector<TrainingSample>& samples);

nlohmann::json model_to_json(const LinearPredictor& model);
LinearPredictor model_from_json(const nlohmann::json& json);
void save_model(const LinearPredictor& model, const std::filesystem::path& path);
LinearPredictor load_model(const std::filesystem::path& path);

/// Splits samples by language pair: every sample of a given pair lands on
/// the same side. Deterministic in `seed`.
std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> train_test_split(
    const std::vector<TrainingSample>& samples, double test_fraction, std::uint64_t seed);

/// Shortest decimal that parses back to the same double.
std::string exact_decimal(double value);
double parse_exact_decimal(std::string_view text);

}  // namespace rttqe
