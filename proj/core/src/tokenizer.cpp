#include "coedit/tokenizer.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "coedit/error.hpp"

namespace coedit {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

/// Length of a special token starting at `pos`, or 0.
std::size_t special_at(std::string_view text, std::size_t pos) {
  if (text[pos] != '<') return 0;
  if (text.compare(pos, 5, "<add>") == 0 || text.compare(pos, 5, "<del>") == 0) return 5;
  std::size_t k = pos + 1;
  while (k < text.size() && k - pos <= 10 && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
  if (k > pos + 1 && k < text.size() && text[k] == '>' && text[pos + 1] != '0') return k + 1 - pos;
  return 0;
}

}  // namespace

std::vector<std::pair<std::string_view, bool>> split_specials(std::string_view text) {
  std::vector<std::pair<std::string_view, bool>> out;
  std::size_t plain_start = 0;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = special_at(text, i);
    if (len == 0) {
      ++i;
      continue;
    }
    if (i > plain_start) out.emplace_back(text.substr(plain_start, i - plain_start), false);
    out.emplace_back(text.substr(i, len), true);
    i += len;
    plain_start = i;
  }
  if (plain_start < text.size()) out.emplace_back(text.substr(plain_start), false);
  return out;
}

// ---- byte fallback ----------------------------------------------------------

namespace {

template <typename Emit>
void byte_fallback_pieces(std::string_view text, Emit&& emit) {
  for (const auto& [segment, special] : split_specials(text)) {
    if (special) {
      emit(segment);
      continue;
    }
    std::size_t i = 0;
    while (i < segment.size()) {
      const auto c = static_cast<unsigned char>(segment[i]);
      std::size_t len = 1;
      if (is_word_char(c)) {
        while (i + len < segment.size() && len < 4 && is_word_char(static_cast<unsigned char>(segment[i + len]))) ++len;
      } else if (c == ' ') {
        while (i + len < segment.size() && len < 4 && segment[i + len] == ' ') ++len;
      }
      emit(segment.substr(i, len));
      i += len;
    }
  }
}

}  // namespace

std::vector<std::string> ByteFallbackTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  byte_fallback_pieces(text, [&](std::string_view piece) { out.emplace_back(piece); });
  return out;
}

std::size_t ByteFallbackTokenizer::count(std::string_view text) const {
  std::size_t n = 0;
  byte_fallback_pieces(text, [&](std::string_view) { ++n; });
  return n;
}

// ---- byte-level BPE -----------------------------------------------------------

namespace {

/// GPT-2 byte to printable code point table, UTF-8 encoded.
const std::vector<std::string>& byte_encoder() {
  static const std::vector<std::string> table = [] {
    std::vector<std::string> t(256);
    int extra = 0;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
      const int cp = printable ? b : 256 + extra++;
      std::string s;
      if (cp < 0x80) {
        s.push_back(static_cast<char>(cp));
      } else {
        s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      }
      t[static_cast<std::size_t>(b)] = s;
    }
    return t;
  }();
  return table;
}

bool is_letter(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Approximation of the GPT-2 pre-tokenization pattern.
std::vector<std::string_view> pretokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t start = i;
    if (s[i] == '\'') {
      for (std::string_view suffix : {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"}) {
        if (s.compare(i, suffix.size(), suffix) == 0) {
          i += suffix.size();
          break;
        }
      }
      if (i > start) {
        out.push_back(s.substr(start, i - start));
        continue;
      }
    }
    std::size_t j = i;
    if (s[j] == ' ' && j + 1 < s.size() && !is_space(static_cast<unsigned char>(s[j + 1]))) ++j;
    const auto c = static_cast<unsigned char>(s[j]);
    if (!is_space(c)) {
      auto same_class = [&](unsigned char d) {
        if (is_letter(c)) return is_letter(d);
        if (std::isdigit(c)) return std::isdigit(d) != 0;
        return !is_space(d) && !is_letter(d) && !std::isdigit(d);
      };
      ++j;
      while (j < s.size() && same_class(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back(s.substr(start, j - start));
      i = j;
      continue;
    }
    // Whitespace run; leave the last space for the following word.
    while (j < s.size() && is_space(static_cast<unsigned char>(s[j]))) ++j;
    if (j < s.size() && j - start > 1 && s[j - 1] == ' ') --j;
    out.push_back(s.substr(start, j - start));
    i = j;
  }
  return out;
}

std::vector<std::string> utf8_symbols(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    const auto c = static_cast<unsigned char>(word[i]);
    const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    out.push_back(word.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

BpeTokenizer::BpeTokenizer(std::unordered_map<std::string, int> vocab,
                           std::vector<std::pair<std::string, std::string>> merges)
    : vocab_(std::move(vocab)) {
  for (std::size_t i = 0; i < merges.size(); ++i) ranks_.emplace(std::move(merges[i]), static_cast<int>(i));
}

std::shared_ptr<BpeTokenizer> BpeTokenizer::load(const std::filesystem::path& path) {
  std::filesystem::path vocab_path = path;
  if (std::filesystem::is_directory(path)) vocab_path = path / "vocab.json";
  const std::filesystem::path merges_path = vocab_path.parent_path() / "merges.txt";
  std::ifstream vocab_file(vocab_path);
  std::ifstream merges_file(merges_path);
  if (!vocab_file || !merges_file) {
    throw DataError("tokenizer needs " + vocab_path.string() + " and " + merges_path.string());
  }
  std::unordered_map<std::string, int> vocab;
  try {
    const auto json = nlohmann::json::parse(vocab_file);
    for (const auto& [token, id] : json.items()) vocab.emplace(token, id.get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid vocabulary " + vocab_path.string() + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> merges;
  std::string line;
  while (std::getline(merges_file, line)) {
    if (line.empty() || line.starts_with("#version")) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) continue;
    merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  return std::make_shared<BpeTokenizer>(std::move(vocab), std::move(merges));
}

std::vector<std::string> BpeTokenizer::encode_word(const std::string& word) const {
  std::vector<std::string> symbols = utf8_symbols(word);
  while (symbols.size() > 1) {
    int best_rank = std::numeric_limits<int>::max();
    std::size_t best = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = ranks_.find({symbols[i], symbols[i + 1]});
      if (it != ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
        best = i;
      }
    }
    if (best_rank == std::numeric_limits<int>::max()) break;
    const std::string left = symbols[best];
    const std::string right = symbols[best + 1];
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        merged.push_back(left + right);
        ++i;
      } else {
        merged.push_back(symbols[i]);
      }
    }
    symbols = std::move(merged);
  }
  return symbols;
}

std::vector<std::string> BpeTokenizer::tokenize(std::string_view text) const {
  const auto& encoder = byte_encoder();
  std::vector<std::string> out;
  for (const auto& [segment, special] : split_specials(text)) {
    if (special) {
      out.emplace_back(segment);
      continue;
    }
    for (const auto piece : pretokenize(segment)) {
      std::string mapped;
      for (const char c : piece) mapped += encoder[static_cast<unsigned char>(c)];
      for (auto& symbol : encode_word(mapped)) out.push_back(std::move(symbol));
    }
  }
  return out;
}

std::shared_ptr<const Tokenizer> default_tokenizer() {
  if (const char* path = std::getenv("COEDIT_TOKENIZER"); path != nullptr && *path != '\0') {
    return BpeTokenizer::load(path);
  }
  return std::make_shared<ByteFallbackTokenizer>();
}

}  // namespace coedit
