#pragma once

// String-based translation metrics: 13a tokenization, n-gram sufficient
// statistics, BLEU (corpus and sentence level), chrF, and the BLEU-derived
// auxiliary regression features.
//
// Every entry point that takes raw text NFC-normalizes it first, so equal
// inputs up to canonical equivalence produce bit-identical scores.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rttqe/error.hpp"

namespace rttqe {

class SubwordVocabulary;

using TokenSequence = std::vector<std::string>;

/// The language-agnostic "13a" tokenizer of the standard BLEU toolkit.
TokenSequence tokenize_13a(std::string_view text);

template <typename Symbol>
struct NgramMultiset {
  int order = 1;
  std::map<std::vector<Symbol>, std::int64_t> counts;

  std::int64_t size() const {
    std::int64_t total = 0;
    for (const auto& [gram, count] : counts) total += count;
    return total;
  }
  std::int64_t count(const std::vector<Symbol>& gram) const {
    auto it = counts.find(gram);
    return it == counts.end() ? 0 : it->second;
  }
};

/// Counts every contiguous window of length `n`.
template <typename Symbol>
NgramMultiset<Symbol> ngram_counts(std::span<const Symbol> seq, int n) {
  if (n < 1) throw ValidationError("n-gram order must be >= 1");
  NgramMultiset<Symbol> out;
  out.order = n;
  const auto order = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + order <= seq.size(); ++i) {
    ++out.counts[std::vector<Symbol>(seq.begin() + i, seq.begin() + i + order)];
  }
  return out;
}

template <typename Symbol>
NgramMultiset<Symbol> ngram_counts(const std::vector<Symbol>& seq, int n) {
  return ngram_counts(std::span<const Symbol>(seq), n);
}

inline constexpr int kBleuOrder = 4;
inline constexpr int kChrfOrder = 6;
inline constexpr double kChrfBeta = 2.0;

/// BLEU sufficient statistics. Additive over segments.
struct BleuStats {
  std::array<std::int64_t, kBleuOrder> matches{};
  std::array<std::int64_t, kBleuOrder> totals{};
  /// Reference n-gram counts per order.
  std::array<std::int64_t, kBleuOrder> ref_totals{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend BleuStats operator+(BleuStats a, const BleuStats& b) { return a += b; }
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats bleu_stats(const TokenSequence& hyp, const TokenSequence& ref);

/// 1 if c >= r, exp(1 - r/c) if 0 < c < r, and 0 for an empty hypothesis
/// against a nonempty reference.
double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len);

enum class SmoothingMode { none, floor, add_k };

struct Smoothing {
  SmoothingMode mode = SmoothingMode::floor;
  double value = 0.1;

  static Smoothing none() { return {SmoothingMode::none, 0.0}; }
  static Smoothing floor(double epsilon = 0.1) { return {SmoothingMode::floor, epsilon}; }
  static Smoothing add_k(double k = 1.0) { return {SmoothingMode::add_k, k}; }

  friend bool operator==(const Smoothing&, const Smoothing&) = default;
};

struct BleuScore {
  double score = 0.0;
  /// Set when the hypothesis side has no unigrams at all.
  bool degenerate = false;
};

/// BLEU from sufficient statistics, in [0, 100]. An order is left out of the
/// geometric mean only when neither side has n-grams of that length; a
/// hypothesis too short for an order the reference has scores 0 there.
BleuScore aggregate_bleu(const BleuStats& stats, const Smoothing& smoothing = {});

/// chrF sufficient statistics per character order (1-based order k at index k-1).
struct ChrfStats {
  std::vector<std::int64_t> matches;
  std::vector<std::int64_t> hyp_totals;
  std::vector<std::int64_t> ref_totals;

  explicit ChrfStats(int order = kChrfOrder)
      : matches(order), hyp_totals(order), ref_totals(order) {}
  int order() const { return static_cast<int>(matches.size()); }
  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref, int order = kChrfOrder);

/// chrF in [0, 100] from (possibly summed) statistics.
double chrf_from_stats(const ChrfStats& stats, double beta = kChrfBeta);

double chrf_score(std::string_view hyp, std::string_view ref, int order = kChrfOrder,
                  double beta = kChrfBeta);

/// Auxiliary regression features: correct 4-gram count and cumulative
/// reference length.
struct AuxFeatures {
  std::int64_t max4_count = 0;
  std::int64_t ref_length = 0;

  friend bool operator==(const AuxFeatures&, const AuxFeatures&) = default;
};

AuxFeatures feature_stats(const BleuStats& stats);

enum class MetricName { bleu_13a, spbleu, chrf, external };
enum class Aggregation { corpus, sentence_average };

std::string to_string(MetricName name);
std::string to_string(SmoothingMode mode);
std::string to_string(Aggregation aggregation);
MetricName parse_metric_name(std::string_view text);
SmoothingMode parse_smoothing_mode(std::string_view text);
Aggregation parse_aggregation(std::string_view text);

struct MetricId {
  MetricName name = MetricName::bleu_13a;
  int max_order = kBleuOrder;
  double beta = kChrfBeta;
  Smoothing smoothing{};
  Aggregation aggregation = Aggregation::corpus;
  /// Names the externally computed metric (e.g. "bertscore") when
  /// name == external; empty otherwise.
  std::string label;

  static MetricId bleu_13a(Aggregation aggregation = Aggregation::corpus,
                           Smoothing smoothing = {});
  static MetricId spbleu(Aggregation aggregation = Aggregation::corpus,
                         Smoothing smoothing = {});
  static MetricId chrf(Aggregation aggregation = Aggregation::corpus);
  static MetricId external(std::string label);

  /// Short identifier used in feature names and reports, e.g. "spbleu".
  std::string key() const;
  bool is_bleu() const { return name == MetricName::bleu_13a || name == MetricName::spbleu; }
  void validate() const;

  friend bool operator==(const MetricId&, const MetricId&) = default;
};

/// Key order used for stable record sorting.
bool operator<(const MetricId& a, const MetricId& b);

struct MetricResult {
  double score = 0.0;
  bool degenerate = false;
  /// Corpus-summed BLEU statistics; present for BLEU-family metrics.
  std::optional<BleuStats> stats;
  std::size_t segments = 0;
};

/// A configured metric over aligned hypothesis/reference segment lists.
class Metric {
 public:
  explicit Metric(MetricId id, std::shared_ptr<const SubwordVocabulary> vocabulary = nullptr);

  const MetricId& id() const { return id_; }

  TokenSequence tokenize(std::string_view text) const;

  /// Throws ValidationError on length mismatch or for external metrics,
  /// which cannot be computed locally.
  MetricResult score(std::span<const std::string> hyps,
                     std::span<const std::string> refs) const;

 private:
  MetricId id_;
  std::shared_ptr<const SubwordVocabulary> vocabulary_;
};

}  // namespace rttqe
