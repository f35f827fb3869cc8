#include "rttqe/subword.hpp"

#include <fstream>
#include <sstream>

#include "rttqe/unicode.hpp"

namespace rttqe {

SubwordVocabulary::SubwordVocabulary(std::vector<std::string> entries) {
  for (std::size_t line = 0; line < entries.size(); ++line) {
    std::string piece = unicode::nfc(entries[line]);
    if (piece.empty()) continue;
    const std::size_t length = unicode::decode(piece).size();
    // Duplicates resolve to the earliest line.
    if (line_of_.emplace(std::move(piece), line).second) {
      max_code_points_ = std::max(max_code_points_, length);
    }
  }
}

SubwordVocabulary SubwordVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open vocabulary file: " + path.string());
  std::vector<std::string> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!unicode::is_valid_utf8(line)) {
      throw ValidationError("invalid UTF-8 in vocabulary " + path.string() + " at line " +
                            std::to_string(number));
    }
    entries.push_back(std::move(line));
  }
  return SubwordVocabulary(std::move(entries));
}

TokenSequence SubwordVocabulary::tokenize(std::string_view text) const {
  TokenSequence out;
  for (const std::string& word : unicode::split_whitespace(unicode::nfc(text))) {
    const std::vector<char32_t> chars = unicode::decode(word);
    std::size_t pos = 0;
    while (pos < chars.size()) {
      std::size_t take = 1;
      std::string piece = unicode::encode(chars[pos]);
      const std::size_t longest = std::min(max_code_points_, chars.size() - pos);
      for (std::size_t length = longest; length >= 1; --length) {
        std::string candidate = unicode::encode(
            std::vector<char32_t>(chars.begin() + pos, chars.begin() + pos + length));
        if (line_of_.contains(candidate)) {
          take = length;
          piece = std::move(candidate);
          break;
        }
      }
      out.push_back(std::move(piece));
      pos += take;
    }
  }
  return out;
}

}  // namespace rttqe
