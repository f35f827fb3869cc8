#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rttqe/dataset.hpp"
#include "rttqe/provenance.hpp"
#include "rttqe/rtt.hpp"
#include "rttqe/textmetrics.hpp"

namespace rttqe {

/// forward: Trans-Score A→B against gold references.
/// self_ab: A → B* → A' compared with A.
/// self_ba: B → A* → B' compared with B.
enum class Direction { forward, self_ab, self_ba };

/// "A→B", "A⟲B", "B⟲A". Parsing also accepts "A->B", "A@B", "B@A".
std::string to_string(Direction direction);
Direction parse_direction(std::string_view text);

struct ScoreRecord {
  LanguagePair language_pair;
  /// The A→B system being evaluated.
  std::string system;
  /// The B→A system; empty for forward records.
  std::string back_system;
  Direction direction = Direction::forward;
  MetricId metric;
  double score = 0.0;
  /// BLEU-family metrics only.
  std::optional<AuxFeatures> aux;
  std::size_t segment_count = 0;
  bool degenerate = false;
  Provenance provenance;

  friend bool operator==(const ScoreRecord& a, const ScoreRecord& b);
};

/// Stable order: (pair, system, direction, metric).
bool record_less(const ScoreRecord& a, const ScoreRecord& b);

nlohmann::json to_json(const ScoreRecord& record);
ScoreRecord record_from_json(const nlohmann::json& json);

/// Line-delimited JSON, one record per line.
void write_records(const std::filesystem::path& path, const std::vector<ScoreRecord>& records);
std::string records_to_jsonl(const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_records(const std::filesystem::path& path);

/// Scores `hyps` against `refs` and wraps the result in a record.
ScoreRecord make_record(const LanguagePair& pair, std::string system, std::string back_system,
                        Direction direction, const Metric& metric,
                        const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs);

ScoreRecord trans_score(const Translator& system_ab, const ParallelCorpus& parallel,
                        const Metric& metric, const TranslationContext& context = {});

/// `corpus` must be in language A for self_ab and in language B for self_ba.
ScoreRecord self_score(Direction direction, const LanguagePair& pair,
                       const Translator& system_ab, const Translator& system_ba,
                       const Corpus& corpus, const Metric& metric,
                       const TranslationContext& context = {});

/// Builds the translator for `system` in direction source → target.
using TranslatorFactory =
    std::function<TranslatorPtr(const std::string& system, const std::string& source_lang,
                                const std::string& target_lang)>;

struct ScoreMatrixRequest {
  std::vector<LanguagePair> pairs;
  std::vector<std::string> systems;
  /// When set, every round trip uses this system for the B→A leg (and for
  /// the first leg of B⟲A) instead of the system under evaluation.
  std::optional<std::string> back_system;
  std::map<std::string, Corpus> corpora;
  std::vector<Metric> metrics;
};

struct ScoreMatrixResult {
  std::vector<ScoreRecord> records;
  std::vector<std::string> diagnostics;
};

/// One record per (pair, system, direction, metric), sorted by record_less.
/// Pairs with a missing corpus are skipped with a diagnostic; when the two
/// corpora differ in length only the self-score records are produced.
ScoreMatrixResult score_matrix(const ScoreMatrixRequest& request, const TranslatorFactory& factory,
                               const TranslationContext& context = {});

}  // namespace rttqe
