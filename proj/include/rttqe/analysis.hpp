#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rttqe/provenance.hpp"
#include "rttqe/scoring.hpp"

namespace rttqe {

struct ErrorStats {
  double mae = 0.0;
  double rmse = 0.0;
};

ErrorStats error_stats(std::span<const double> predicted, std::span<const double> truth);

/// Sample Pearson correlation. Throws UndefinedCorrelation for n < 2 or a
/// constant input.
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b in O(n log n). Throws UndefinedCorrelation for n < 2 or
/// when either side is entirely tied.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, highest score first; tied scores share their average rank.
std::vector<double> average_ranks(std::span<const double> scores);

struct ErrorReport {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> pearson_r;
  std::optional<double> kendall_tau;
  std::size_t n = 0;
  /// Why a correlation is missing, if one is.
  std::vector<std::string> notes;
};

/// Errors plus correlations between predicted and true scores; undefined
/// correlations are left empty with a note instead of failing the report.
ErrorReport error_report(std::span<const double> predicted, std::span<const double> truth);

struct CorrelationRow {
  std::string system;
  MetricId metric;
  /// Which Self-Score direction is correlated with the Trans-Score.
  Direction comparison = Direction::self_ab;
  double r = 0.0;
  /// (Trans-Score, Self-Score) per language pair.
  std::vector<std::pair<double, double>> points;
  std::vector<std::string> pairs;
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;
  std::vector<std::string> diagnostics;
};

/// Pearson r between Trans-Score and each Self-Score direction, computed
/// across language pairs, one row per (system, metric, direction).
CorrelationReport correlation_report(const std::vector<ScoreRecord>& records);

struct SystemEntry {
  std::string system;
  double predicted = 0.0;
  std::optional<double> truth;
};

struct RankedSystem {
  std::string system;
  double predicted = 0.0;
  std::optional<double> truth;
  double predicted_rank = 0.0;
  std::optional<double> true_rank;
};

struct RankingReport {
  /// In predicted-rank order.
  std::vector<RankedSystem> systems;
  std::optional<double> kendall_tau;
  std::optional<double> pearson_r;
  std::optional<ErrorStats> errors;
  std::string tau_variant = "tau-b";
};

/// Throws ValidationError for fewer than two systems or duplicate ids.
/// Correlations are filled only when every entry carries a true score, and
/// stay empty when a side is constant.
RankingReport rank_systems(const std::vector<SystemEntry>& entries);

nlohmann::json to_json(const ErrorReport& report, const Provenance& provenance = {});
nlohmann::json to_json(const RankingReport& report, const Provenance& provenance = {});
/// One JSON object per row.
std::string to_jsonl(const CorrelationReport& report, const Provenance& provenance = {});

std::string to_table(const ErrorReport& report);
std::string to_table(const RankingReport& report);
std::string to_table(const CorrelationReport& report);

/// "system,metric,direction,pair,trans_score,self_score" rows.
std::string plot_csv(const CorrelationReport& report);

}  // namespace rttqe
