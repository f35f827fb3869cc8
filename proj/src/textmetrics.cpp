#include "rttqe/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rttqe/subword.hpp"
#include "rttqe/unicode.hpp"

namespace rttqe {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Character class {-~ [-` space-& (-+ :-@ /
bool is_13a_symbol(char c) {
  return (c >= '{' && c <= '~') || (c >= '[' && c <= '`') || (c >= ' ' && c <= '&') ||
         (c >= '(' && c <= '+') || (c >= ':' && c <= '@') || c == '/';
}

bool is_period_or_comma(char c) { return c == '.' || c == ','; }

// Non-overlapping left-to-right substitution of a two-character pattern,
// mirroring re.sub semantics.
template <typename First, typename Second, typename Emit>
std::string substitute_pairs(const std::string& s, First first, Second second, Emit emit) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && first(s[i]) && second(s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out += s[i];
      ++i;
    }
  }
  return out;
}

template <typename Symbol>
std::int64_t clipped_matches(const NgramMultiset<Symbol>& hyp, const NgramMultiset<Symbol>& ref) {
  std::int64_t matched = 0;
  for (const auto& [gram, count] : hyp.counts) {
    matched += std::min(count, ref.count(gram));
  }
  return matched;
}

}  // namespace

TokenSequence tokenize_13a(std::string_view text) {
  std::string line = unicode::nfc(text);
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  replace_all(line, "\n", " ");
  if (line.find('&') != std::string::npos) {
    replace_all(line, "&quot;", "\"");
    replace_all(line, "&amp;", "&");
    replace_all(line, "&lt;", "<");
    replace_all(line, "&gt;", ">");
  }

  std::string spaced;
  spaced.reserve(line.size() * 2 + 2);
  spaced += ' ';
  for (char c : line) {
    if (is_13a_symbol(c)) {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  spaced += ' ';

  auto not_digit = [](char c) { return !is_digit(c); };
  spaced = substitute_pairs(spaced, not_digit, is_period_or_comma,
                            [](std::string& out, char a, char b) {
                              out += a;
                              out += ' ';
                              out += b;
                              out += ' ';
                            });
  spaced = substitute_pairs(spaced, is_period_or_comma, not_digit,
                            [](std::string& out, char a, char b) {
                              out += ' ';
                              out += a;
                              out += ' ';
                              out += b;
                            });
  spaced = substitute_pairs(spaced, is_digit, [](char c) { return c == '-'; },
                            [](std::string& out, char a, char b) {
                              out += a;
                              out += ' ';
                              out += b;
                              out += ' ';
                            });
  return unicode::split_whitespace(spaced);
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int k = 0; k < kBleuOrder; ++k) {
    matches[k] += other.matches[k];
    totals[k] += other.totals[k];
    ref_totals[k] += other.ref_totals[k];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats bleu_stats(const TokenSequence& hyp, const TokenSequence& ref) {
  BleuStats stats;
  stats.hyp_len = static_cast<std::int64_t>(hyp.size());
  stats.ref_len = static_cast<std::int64_t>(ref.size());
  for (int n = 1; n <= kBleuOrder; ++n) {
    stats.ref_totals[n - 1] = std::max<std::int64_t>(0, stats.ref_len - n + 1);
    if (hyp.size() < static_cast<std::size_t>(n)) continue;
    const auto hyp_grams = ngram_counts(hyp, n);
    const auto ref_grams = ngram_counts(ref, n);
    stats.totals[n - 1] = stats.hyp_len - n + 1;
    stats.matches[n - 1] = clipped_matches(hyp_grams, ref_grams);
  }
  return stats;
}

double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  if (hyp_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

BleuScore aggregate_bleu(const BleuStats& stats, const Smoothing& smoothing) {
  if (stats.totals[0] == 0) return {0.0, true};

  double log_sum = 0.0;
  int used = 0;
  for (int k = 0; k < kBleuOrder; ++k) {
    double matched = static_cast<double>(stats.matches[k]);
    double total = static_cast<double>(stats.totals[k]);
    if (stats.totals[k] == 0 && stats.ref_totals[k] == 0) continue;
    if (smoothing.mode == SmoothingMode::add_k && k > 0) {
      matched += smoothing.value;
      total += smoothing.value;
    }
    if (total == 0.0) return {0.0, false};
    double precision;
    if (matched == 0.0) {
      if (smoothing.mode != SmoothingMode::floor) return {0.0, false};
      precision = smoothing.value / total;
    } else {
      precision = matched / total;
    }
    log_sum += std::log(precision);
    ++used;
  }
  const double bp = brevity_penalty(stats.hyp_len, stats.ref_len);
  const double score = 100.0 * bp * std::exp(log_sum / used);
  return {std::clamp(score, 0.0, 100.0), false};
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (other.order() != order()) throw ValidationError("chrF statistics of different orders");
  for (std::size_t k = 0; k < matches.size(); ++k) {
    matches[k] += other.matches[k];
    hyp_totals[k] += other.hyp_totals[k];
    ref_totals[k] += other.ref_totals[k];
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref, int order) {
  if (order < 1) throw ValidationError("chrF order must be >= 1");
  const auto hyp_chars = unicode::strip_whitespace(unicode::nfc(hyp));
  const auto ref_chars = unicode::strip_whitespace(unicode::nfc(ref));
  ChrfStats stats(order);
  for (int n = 1; n <= order; ++n) {
    const auto hyp_grams = ngram_counts(hyp_chars, n);
    const auto ref_grams = ngram_counts(ref_chars, n);
    stats.hyp_totals[n - 1] = hyp_grams.size();
    stats.ref_totals[n - 1] = ref_grams.size();
    stats.matches[n - 1] = clipped_matches(hyp_grams, ref_grams);
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int used = 0;
  for (int k = 0; k < stats.order(); ++k) {
    // An order absent from both sides carries no evidence either way.
    if (stats.hyp_totals[k] == 0 && stats.ref_totals[k] == 0) continue;
    const double matched = static_cast<double>(stats.matches[k]);
    if (stats.hyp_totals[k] > 0) precision_sum += matched / static_cast<double>(stats.hyp_totals[k]);
    if (stats.ref_totals[k] > 0) recall_sum += matched / static_cast<double>(stats.ref_totals[k]);
    ++used;
  }
  if (used == 0) return 0.0;
  const double precision = precision_sum / used;
  const double recall = recall_sum / used;
  if (precision + recall == 0.0) return 0.0;
  const double beta2 = beta * beta;
  const double f = (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
  return std::clamp(100.0 * f, 0.0, 100.0);
}

double chrf_score(std::string_view hyp, std::string_view ref, int order, double beta) {
  return chrf_from_stats(chrf_stats(hyp, ref, order), beta);
}

AuxFeatures feature_stats(const BleuStats& stats) {
  return {stats.matches[kBleuOrder - 1], stats.ref_len};
}

std::string to_string(MetricName name) {
  switch (name) {
    case MetricName::bleu_13a: return "bleu-13a";
    case MetricName::spbleu: return "spbleu";
    case MetricName::chrf: return "chrf";
    case MetricName::external: return "external";
  }
  return "unknown";
}

std::string to_string(SmoothingMode mode) {
  switch (mode) {
    case SmoothingMode::none: return "none";
    case SmoothingMode::floor: return "floor";
    case SmoothingMode::add_k: return "add-k";
  }
  return "unknown";
}

std::string to_string(Aggregation aggregation) {
  return aggregation == Aggregation::corpus ? "corpus-level" : "sentence-average";
}

MetricName parse_metric_name(std::string_view text) {
  if (text == "bleu-13a" || text == "bleu" || text == "sacrebleu") return MetricName::bleu_13a;
  if (text == "spbleu") return MetricName::spbleu;
  if (text == "chrf") return MetricName::chrf;
  if (text == "external") return MetricName::external;
  throw ValidationError("unknown metric name: " + std::string(text));
}

SmoothingMode parse_smoothing_mode(std::string_view text) {
  if (text == "none") return SmoothingMode::none;
  if (text == "floor") return SmoothingMode::floor;
  if (text == "add-k") return SmoothingMode::add_k;
  throw ValidationError("unknown smoothing mode: " + std::string(text));
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "corpus-level" || text == "corpus") return Aggregation::corpus;
  if (text == "sentence-average" || text == "sentence") return Aggregation::sentence_average;
  throw ValidationError("unknown aggregation mode: " + std::string(text));
}

MetricId MetricId::bleu_13a(Aggregation aggregation, Smoothing smoothing) {
  MetricId id;
  id.name = MetricName::bleu_13a;
  id.aggregation = aggregation;
  id.smoothing = smoothing;
  return id;
}

MetricId MetricId::spbleu(Aggregation aggregation, Smoothing smoothing) {
  MetricId id = bleu_13a(aggregation, smoothing);
  id.name = MetricName::spbleu;
  return id;
}

MetricId MetricId::chrf(Aggregation aggregation) {
  MetricId id;
  id.name = MetricName::chrf;
  id.max_order = kChrfOrder;
  id.beta = kChrfBeta;
  id.smoothing = Smoothing::none();
  id.aggregation = aggregation;
  return id;
}

MetricId MetricId::external(std::string label) {
  MetricId id;
  id.name = MetricName::external;
  id.max_order = 0;
  id.beta = 0.0;
  id.smoothing = Smoothing::none();
  id.label = std::move(label);
  return id;
}

std::string MetricId::key() const {
  return name == MetricName::external ? label : to_string(name);
}

void MetricId::validate() const {
  switch (name) {
    case MetricName::bleu_13a:
    case MetricName::spbleu:
      if (max_order != kBleuOrder) throw ValidationError("BLEU metrics use word order 4");
      if (smoothing.mode == SmoothingMode::floor && !(smoothing.value > 0.0 && smoothing.value <= 1.0))
        throw ValidationError("floor smoothing value must lie in (0, 1]");
      if (smoothing.mode == SmoothingMode::add_k && !(smoothing.value > 0.0))
        throw ValidationError("add-k smoothing value must be positive");
      break;
    case MetricName::chrf:
      if (max_order < 1) throw ValidationError("chrF order must be >= 1");
      if (!(beta > 0.0)) throw ValidationError("chrF beta must be positive");
      break;
    case MetricName::external:
      if (label.empty()) throw ValidationError("external metric requires a label");
      break;
  }
}

bool operator<(const MetricId& a, const MetricId& b) {
  auto tie = [](const MetricId& m) {
    return std::make_tuple(m.key(), static_cast<int>(m.name), static_cast<int>(m.aggregation),
                           static_cast<int>(m.smoothing.mode), m.smoothing.value, m.max_order,
                           m.beta);
  };
  return tie(a) < tie(b);
}

Metric::Metric(MetricId id, std::shared_ptr<const SubwordVocabulary> vocabulary)
    : id_(std::move(id)), vocabulary_(std::move(vocabulary)) {
  id_.validate();
}

TokenSequence Metric::tokenize(std::string_view text) const {
  switch (id_.name) {
    case MetricName::bleu_13a:
      return tokenize_13a(text);
    case MetricName::spbleu:
      if (vocabulary_) return vocabulary_->tokenize(text);
      // Without a vocabulary the input is taken to be pre-tokenized.
      return unicode::split_whitespace(unicode::nfc(text));
    case MetricName::chrf:
    case MetricName::external:
      break;
  }
  throw ValidationError("metric " + id_.key() + " has no word tokenizer");
}

MetricResult Metric::score(std::span<const std::string> hyps,
                           std::span<const std::string> refs) const {
  if (hyps.size() != refs.size()) {
    throw ValidationError("hypothesis/reference count mismatch: " + std::to_string(hyps.size()) +
                          " vs " + std::to_string(refs.size()));
  }
  MetricResult result;
  result.segments = hyps.size();
  if (hyps.empty()) throw ValidationError("cannot score an empty corpus");

  if (id_.name == MetricName::external) {
    throw ValidationError("external metric '" + id_.label + "' must be supplied as data");
  }

  const bool sentence_average = id_.aggregation == Aggregation::sentence_average;
  double sentence_sum = 0.0;

  if (id_.is_bleu()) {
    BleuStats total;
    std::size_t degenerate_segments = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      const BleuStats segment = bleu_stats(tokenize(hyps[i]), tokenize(refs[i]));
      total += segment;
      if (sentence_average) {
        const BleuScore s = aggregate_bleu(segment, id_.smoothing);
        sentence_sum += s.score;
        if (s.degenerate) ++degenerate_segments;
      }
    }
    result.stats = total;
    if (sentence_average) {
      result.score = sentence_sum / static_cast<double>(hyps.size());
      result.degenerate = degenerate_segments == hyps.size();
    } else {
      const BleuScore s = aggregate_bleu(total, id_.smoothing);
      result.score = s.score;
      result.degenerate = s.degenerate;
    }
    return result;
  }

  ChrfStats total(id_.max_order);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const ChrfStats segment = chrf_stats(hyps[i], refs[i], id_.max_order);
    if (sentence_average) {
      sentence_sum += chrf_from_stats(segment, id_.beta);
    } else {
      total += segment;
    }
  }
  result.score = sentence_average ? sentence_sum / static_cast<double>(hyps.size())
                                  : chrf_from_stats(total, id_.beta);
  return result;
}

}  // namespace rttqe
