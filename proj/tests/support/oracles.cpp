#include "oracles.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace oracle {

namespace {

template <typename Seq>
std::map<Seq, int> grams(const Seq& seq, std::size_t n) {
  std::map<Seq, int> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) out[Seq(seq.begin() + i, seq.begin() + i + n)]++;
  return out;
}

}  // namespace

double corpus_bleu(const std::vector<std::vector<std::string>>& hyps,
                   const std::vector<std::vector<std::string>>& refs, double floor_eps) {
  double c = 0, r = 0;
  double match[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  double ref_total[4] = {0, 0, 0, 0};
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    c += hyps[s].size();
    r += refs[s].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      auto h = grams(hyps[s], n);
      auto g = grams(refs[s], n);
      for (auto& [gram, count] : g) ref_total[n - 1] += count;
      for (auto& [gram, count] : h) {
        total[n - 1] += count;
        auto it = g.find(gram);
        if (it != g.end()) match[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (total[0] == 0) return 0.0;
  double log_sum = 0;
  int used = 0;
  for (int n = 0; n < 4; ++n) {
    if (total[n] == 0 && ref_total[n] == 0) continue;
    if (total[n] == 0) return 0.0;
    double m = match[n];
    if (m == 0) {
      if (floor_eps <= 0) return 0.0;
      m = floor_eps;
    }
    log_sum += std::log(m / total[n]);
    ++used;
  }
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / used);
}

double chrf(const std::u32string& hyp, const std::u32string& ref, int order, double beta) {
  double p_sum = 0, r_sum = 0;
  int used = 0;
  for (int n = 1; n <= order; ++n) {
    auto h = grams(hyp, n);
    auto g = grams(ref, n);
    double h_total = 0, g_total = 0, m = 0;
    for (auto& [gram, count] : h) h_total += count;
    for (auto& [gram, count] : g) g_total += count;
    if (h_total == 0 && g_total == 0) continue;
    for (auto& [gram, count] : h) {
      auto it = g.find(gram);
      if (it != g.end()) m += std::min(count, it->second);
    }
    p_sum += h_total > 0 ? m / h_total : 0.0;
    r_sum += g_total > 0 ? m / g_total : 0.0;
    ++used;
  }
  if (used == 0) return 0.0;
  const double p = p_sum / used, r = r_sum / used;
  if (p + r == 0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * p * r / (b2 * p + r);
}

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt(double(concordant + discordant + tie_x) *
                                 double(concordant + discordant + tie_y));
  if (denom == 0) throw std::domain_error("undefined");
  return double(concordant - discordant) / denom;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::u32string to_u32_nospace(const std::string& text) {
  std::u32string out;
  for (std::size_t i = 0; i < text.size();) {
    const unsigned char c = text[i];
    char32_t cp;
    int len;
    if (c < 0x80) {
      cp = c, len = 1;
    } else if ((c >> 5) == 6) {
      cp = c & 0x1f, len = 2;
    } else if ((c >> 4) == 14) {
      cp = c & 0x0f, len = 3;
    } else {
      cp = c & 0x07, len = 4;
    }
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (text[i + k] & 0x3f);
    i += len;
    if (cp == U' ' || cp == U'\t' || cp == U'\n') continue;
    out.push_back(cp);
  }
  return out;
}

}  // namespace oracle

namespace synthetic {

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = [] {
    const char* syllables[] = {"ka", "lo", "mi", "ne", "su", "ta", "ri", "po", "de", "fa",
                               "gu", "he", "ji", "vo", "ze", "ba", "co", "ly", "wu", "xe"};
    std::vector<std::string> out;
    for (auto* a : syllables)
      for (auto* b : syllables) out.push_back(std::string(a) + b);
    for (auto* a : syllables) out.push_back(a);
    return out;
  }();
  return words;
}

std::size_t below(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

}  // namespace

std::string sentence(std::mt19937_64& rng, std::size_t words) {
  const auto& vocab = vocabulary();
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += vocab[below(rng, vocab.size())];
  }
  out += '.';
  return out;
}

std::vector<std::string> corpus(std::uint64_t seed, std::size_t segments, std::size_t min_words,
                                std::size_t max_words) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < segments; ++i) {
    out.push_back(sentence(rng, min_words + below(rng, max_words - min_words + 1)));
  }
  return out;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n, std::size_t alphabet) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, char('a' + below(rng, alphabet))));
  return out;
}

}  // namespace synthetic
