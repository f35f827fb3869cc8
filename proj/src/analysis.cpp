#include "rttqe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"

namespace rttqe {

using nlohmann::json;

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  for (double v : a)
    if (!std::isfinite(v)) throw ValidationError("non-finite value");
  for (double v : b)
    if (!std::isfinite(v)) throw ValidationError("non-finite value");
}

// Merge sort on `values`, returning the number of inversions.
std::uint64_t count_inversions(std::vector<double>& values) {
  std::vector<double> buffer(values.size());
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < values.size(); width *= 2) {
    for (std::size_t lo = 0; lo < values.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, values.size());
      const std::size_t hi = std::min(lo + 2 * width, values.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          swaps += mid - i;
          buffer[k++] = values[j++];
        } else {
          buffer[k++] = values[i++];
        }
      }
      while (i < mid) buffer[k++] = values[i++];
      while (j < hi) buffer[k++] = values[j++];
    }
    values.swap(buffer);
  }
  return swaps;
}

// Σ t(t−1)/2 over runs of equal adjacent values in a sorted range.
template <typename Equal>
std::uint64_t tied_pairs(std::size_t n, Equal equal) {
  std::uint64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

std::string fixed(double value, int decimals = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

std::string optional_fixed(const std::optional<double>& value) {
  return value ? fixed(*value) : std::string("n/a");
}

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

// Left-aligned columns separated by two spaces.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return {};
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace

ErrorStats error_stats(std::span<const double> predicted, std::span<const double> truth) {
  check_lengths(predicted, truth);
  if (predicted.empty()) throw ValidationError("error statistics need at least one value");
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const auto n = static_cast<double>(predicted.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (x.size() < 2) throw UndefinedCorrelation("Pearson r needs at least 2 observations");
  const auto n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("Pearson r is undefined for a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const std::size_t n = x.size();
  if (n < 2) throw UndefinedCorrelation("Kendall tau needs at least 2 observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tied_x =
      tied_pairs(n, [&](std::size_t i, std::size_t j) { return x[order[i]] == x[order[j]]; });
  const std::uint64_t tied_xy = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]] && y[order[i]] == y[order[j]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  // Inversions of y within an x-sorted sequence are the discordant pairs;
  // pairs tied in x were pre-sorted by y, so they contribute none.
  const std::uint64_t discordant = count_inversions(ys);
  const std::uint64_t tied_y = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });

  const std::uint64_t untied_x = total - tied_x;
  const std::uint64_t untied_y = total - tied_y;
  if (untied_x == 0 || untied_y == 0) {
    throw UndefinedCorrelation("Kendall tau is undefined when all pairs are tied");
  }
  // C + D = total − tied_x − tied_y + tied_xy
  const auto concordant_plus_discordant =
      static_cast<double>(total - tied_x - tied_y + tied_xy);
  const double numerator = concordant_plus_discordant - 2.0 * static_cast<double>(discordant);
  const double tau =
      numerator / std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
  return std::clamp(tau, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

ErrorReport error_report(std::span<const double> predicted, std::span<const double> truth) {
  const ErrorStats errors = error_stats(predicted, truth);
  ErrorReport report;
  report.mae = errors.mae;
  report.rmse = errors.rmse;
  report.n = predicted.size();
  try {
    report.pearson_r = pearson_r(predicted, truth);
  } catch (const UndefinedCorrelation& e) {
    report.notes.push_back(std::string("pearson_r: ") + e.what());
  }
  try {
    report.kendall_tau = kendall_tau(predicted, truth);
  } catch (const UndefinedCorrelation& e) {
    report.notes.push_back(std::string("kendall_tau: ") + e.what());
  }
  return report;
}

CorrelationReport correlation_report(const std::vector<ScoreRecord>& records) {
  // (system, metric) → pair → direction → score
  struct Key {
    std::string system;
    MetricId metric;
    bool operator<(const Key& o) const {
      if (system != o.system) return system < o.system;
      return metric < o.metric;
    }
  };
  std::map<Key, std::map<LanguagePair, std::map<Direction, std::vector<double>>>> table;
  for (const auto& r : records) {
    table[{r.system, r.metric}][r.language_pair][r.direction].push_back(r.score);
  }

  CorrelationReport report;
  for (const auto& [key, by_pair] : table) {
    for (Direction comparison : {Direction::self_ab, Direction::self_ba}) {
      CorrelationRow row;
      row.system = key.system;
      row.metric = key.metric;
      row.comparison = comparison;
      const std::string tag = key.system + "/" + key.metric.key() + "/" +
                              to_string(key.metric.aggregation) + "/" + to_string(comparison);
      for (const auto& [pair, by_direction] : by_pair) {
        auto forward = by_direction.find(Direction::forward);
        auto self = by_direction.find(comparison);
        if (forward == by_direction.end() || self == by_direction.end()) continue;
        if (forward->second.size() != 1 || self->second.size() != 1) {
          report.diagnostics.push_back(tag + ": duplicate records for " + pair.str() + ", skipped");
          continue;
        }
        row.points.emplace_back(forward->second.front(), self->second.front());
        row.pairs.push_back(pair.str());
      }
      if (row.points.size() < 2) {
        report.diagnostics.push_back(tag + ": " + std::to_string(row.points.size()) +
                                     " language pair(s) with both scores, need at least 2");
        continue;
      }
      std::vector<double> trans, self;
      for (const auto& [t, s] : row.points) {
        trans.push_back(t);
        self.push_back(s);
      }
      try {
        row.r = pearson_r(trans, self);
      } catch (const UndefinedCorrelation& e) {
        report.diagnostics.push_back(tag + ": " + e.what());
        continue;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

RankingReport rank_systems(const std::vector<SystemEntry>& entries) {
  if (entries.size() < 2) throw ValidationError("ranking needs at least 2 systems");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.system).second) throw ValidationError("duplicate system id: " + e.system);
    if (!std::isfinite(e.predicted) || (e.truth && !std::isfinite(*e.truth))) {
      throw ValidationError("non-finite score for system " + e.system);
    }
  }

  std::vector<double> predicted;
  for (const auto& e : entries) predicted.push_back(e.predicted);
  const std::vector<double> predicted_ranks = average_ranks(predicted);

  const bool have_truth =
      std::all_of(entries.begin(), entries.end(), [](const SystemEntry& e) { return e.truth.has_value(); });
  std::vector<double> truth;
  std::vector<double> true_ranks;
  if (have_truth) {
    for (const auto& e : entries) truth.push_back(*e.truth);
    true_ranks = average_ranks(truth);
  }

  RankingReport report;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    RankedSystem ranked{entries[i].system, entries[i].predicted, entries[i].truth,
                        predicted_ranks[i], std::nullopt};
    if (have_truth) ranked.true_rank = true_ranks[i];
    report.systems.push_back(std::move(ranked));
  }
  std::stable_sort(report.systems.begin(), report.systems.end(),
                   [](const RankedSystem& a, const RankedSystem& b) {
                     return a.predicted_rank < b.predicted_rank;
                   });
  if (have_truth) {
    report.errors = error_stats(predicted, truth);
    try {
      report.kendall_tau = kendall_tau(predicted, truth);
    } catch (const UndefinedCorrelation&) {
    }
    try {
      report.pearson_r = pearson_r(predicted, truth);
    } catch (const UndefinedCorrelation&) {
    }
  }
  return report;
}

json to_json(const ErrorReport& report, const Provenance& provenance) {
  return {{"mae", report.mae},
          {"rmse", report.rmse},
          {"pearson_r", optional_number(report.pearson_r)},
          {"kendall_tau", optional_number(report.kendall_tau)},
          {"tau_variant", "tau-b"},
          {"n", report.n},
          {"notes", report.notes},
          {"tool_version", provenance.tool_version},
          {"config_digest", provenance.config_digest}};
}

json to_json(const RankingReport& report, const Provenance& provenance) {
  json systems = json::array();
  for (const auto& s : report.systems) {
    systems.push_back({{"system", s.system},
                       {"predicted", s.predicted},
                       {"truth", optional_number(s.truth)},
                       {"predicted_rank", s.predicted_rank},
                       {"true_rank", optional_number(s.true_rank)}});
  }
  json out = {{"systems", systems},
              {"kendall_tau", optional_number(report.kendall_tau)},
              {"pearson_r", optional_number(report.pearson_r)},
              {"tau_variant", report.tau_variant},
              {"tool_version", provenance.tool_version},
              {"config_digest", provenance.config_digest}};
  if (report.errors) {
    out["mae"] = report.errors->mae;
    out["rmse"] = report.errors->rmse;
  }
  return out;
}

std::string to_jsonl(const CorrelationReport& report, const Provenance& provenance) {
  std::string out;
  for (const auto& row : report.rows) {
    const json line = {{"system", row.system},
                       {"metric", row.metric.key()},
                       {"aggregation", to_string(row.metric.aggregation)},
                       {"comparison", to_string(Direction::forward) + " vs " + to_string(row.comparison)},
                       {"pearson_r", row.r},
                       {"n_pairs", row.points.size()},
                       {"tool_version", provenance.tool_version},
                       {"config_digest", provenance.config_digest}};
    out += line.dump() + '\n';
  }
  return out;
}

std::string to_table(const ErrorReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"n", "MAE", "RMSE", "r", "tau-b"},
      {std::to_string(report.n), fixed(report.mae), fixed(report.rmse),
       optional_fixed(report.pearson_r), optional_fixed(report.kendall_tau)}};
  std::string out = render_table(rows);
  for (const auto& note : report.notes) out += "note: " + note + '\n';
  return out;
}

std::string to_table(const RankingReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"rank", "system", "predicted", "truth", "true_rank"}};
  for (const auto& s : report.systems) {
    rows.push_back({fixed(s.predicted_rank, 1), s.system, fixed(s.predicted),
                    optional_fixed(s.truth), s.true_rank ? fixed(*s.true_rank, 1) : "n/a"});
  }
  std::string out = render_table(rows);
  if (report.kendall_tau) {
    out += "kendall " + report.tau_variant + " = " + fixed(*report.kendall_tau) +
           ", pearson r = " + fixed(*report.pearson_r) + ", MAE = " + fixed(report.errors->mae) +
           ", RMSE = " + fixed(report.errors->rmse) + '\n';
  }
  return out;
}

std::string to_table(const CorrelationReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"system", "metric", "aggregation", "comparison", "r", "pairs"}};
  for (const auto& row : report.rows) {
    rows.push_back({row.system, row.metric.key(), to_string(row.metric.aggregation),
                    to_string(Direction::forward) + " vs " + to_string(row.comparison),
                    fixed(row.r), std::to_string(row.points.size())});
  }
  std::string out = render_table(rows);
  for (const auto& d : report.diagnostics) out += "note: " + d + '\n';
  return out;
}

std::string plot_csv(const CorrelationReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "system,metric,direction,pair,trans_score,self_score\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.points.size(); ++i) {
      out << row.system << ',' << row.metric.key() << ',' << to_string(row.comparison) << ','
          << row.pairs[i] << ',' << row.points[i].first << ',' << row.points[i].second << '\n';
    }
  }
  return out.str();
}

}  // namespace rttqe
