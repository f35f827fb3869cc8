#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rttqe/textmetrics.hpp"

namespace rttqe {

/// Greedy longest-match subword tokenizer backed by a plain vocabulary list
/// (UTF-8, one entry per line). Used for spBLEU when no pre-tokenized input
/// is available. Code points not covered by any entry become single-character
/// pieces.
class SubwordVocabulary {
 public:
  explicit SubwordVocabulary(std::vector<std::string> entries);

  static SubwordVocabulary load(const std::filesystem::path& path);

  /// Whitespace-splits NFC-normalized text, then segments each word.
  TokenSequence tokenize(std::string_view text) const;

  std::size_t size() const { return line_of_.size(); }
  bool contains(const std::string& piece) const { return line_of_.contains(piece); }
  /// 0-based line of the first occurrence of `piece`.
  std::size_t line_of(const std::string& piece) const { return line_of_.at(piece); }

 private:
  std::unordered_map<std::string, std::size_t> line_of_;
  std::size_t max_code_points_ = 0;
};

}  // namespace rttqe
