#include "rttqe/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rttqe/error.hpp"
#include "rttqe/unicode.hpp"

namespace rttqe {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

Corpus parse_corpus(std::string_view bytes, std::string lang, std::string_view origin) {
  Corpus corpus;
  corpus.lang = std::move(lang);
  std::size_t number = 0;
  for (std::string_view line : split_lines(bytes)) {
    ++number;
    if (!unicode::is_valid_utf8(line)) {
      throw ValidationError("invalid UTF-8 in " + std::string(origin) + " at line " +
                            std::to_string(number));
    }
    corpus.segments.push_back(unicode::nfc(line));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::string lang) {
  return parse_corpus(read_file(path), std::move(lang), path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& segment : corpus.segments) out << segment << '\n';
  if (!out) throw ValidationError("write failed: " + path.string());
}

ParallelCorpus align_parallel(const Corpus& a, const Corpus& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cannot align corpora of different sizes (" + std::to_string(a.size()) +
                          ", " + std::to_string(b.size()) + ")");
  }
  return {a.lang, b.lang, a.segments, b.segments};
}

std::string to_string(ResourceClass resource) {
  switch (resource) {
    case ResourceClass::high: return "high";
    case ResourceClass::medium: return "medium";
    case ResourceClass::low: return "low";
  }
  return "unknown";
}

std::string to_string(Usage usage) { return usage == Usage::train_test ? "train+test" : "test"; }

std::vector<LanguageSpec> parse_registry(std::string_view text) {
  std::vector<LanguageSpec> registry;
  std::set<std::string> seen;
  std::size_t number = 0;
  bool header_seen = false;
  for (std::string_view raw : split_lines(text)) {
    ++number;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.emplace_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::string where = "registry line " + std::to_string(number);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"code", "resource", "usage"}) {
        throw ValidationError(where + ": expected header code,resource,usage");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ValidationError(where + ": expected 3 fields");
    LanguageSpec spec;
    spec.code = fields[0];
    if (spec.code.empty()) throw ValidationError(where + ": empty language code");
    if (fields[1] == "high") spec.resource = ResourceClass::high;
    else if (fields[1] == "medium") spec.resource = ResourceClass::medium;
    else if (fields[1] == "low") spec.resource = ResourceClass::low;
    else throw ValidationError(where + ": unknown resource class '" + fields[1] + "'");
    if (fields[2] == "train+test") spec.usage = Usage::train_test;
    else if (fields[2] == "test") spec.usage = Usage::test;
    else throw ValidationError(where + ": unknown usage '" + fields[2] + "'");
    if (!seen.insert(spec.code).second) {
      throw ValidationError(where + ": duplicate language code '" + spec.code + "'");
    }
    registry.push_back(std::move(spec));
  }
  if (!header_seen) throw ValidationError("registry is missing its header");
  return registry;
}

std::vector<LanguageSpec> load_registry(const std::filesystem::path& path) {
  return parse_registry(read_file(path));
}

LanguagePair LanguagePair::parse(std::string_view text) {
  const std::size_t dash = text.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 >= text.size() ||
      text.find('-', dash + 1) != std::string_view::npos) {
    throw ValidationError("language pair must look like 'src-tgt': " + std::string(text));
  }
  return {std::string(text.substr(0, dash)), std::string(text.substr(dash + 1))};
}

PairPartition enumerate_pairs(const std::vector<LanguageSpec>& registry) {
  if (registry.empty()) throw ValidationError("registry needs at least one language");
  std::set<std::string> seen;
  for (const auto& spec : registry) {
    if (!seen.insert(spec.code).second) {
      throw ValidationError("duplicate language code '" + spec.code + "'");
    }
  }
  PairPartition partition;
  for (const auto& a : registry) {
    for (const auto& b : registry) {
      if (a.code == b.code) continue;
      const int test_only = (a.usage == Usage::test) + (b.usage == Usage::test);
      LanguagePair pair{a.code, b.code};
      if (test_only == 0) partition.type1.push_back(std::move(pair));
      else if (test_only == 1) partition.type2.push_back(std::move(pair));
      else partition.type3.push_back(std::move(pair));
    }
  }
  return partition;
}

}  // namespace rttqe
