#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coedit {

/// Text to token list. Special tokens (`<add>`, `<del>`, `<k>`) are always
/// one token each. Implementations are stateless per call.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }
  virtual std::string name() const = 0;
};

/// Hermetic tokenizer: specials and newlines are single tokens, identifier
/// and number runs are cut into chunks of up to 4 characters, runs of up to
/// 4 spaces form one token, every other ASCII character is its own token and
/// non-ASCII bytes are one token each.
class ByteFallbackTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::size_t count(std::string_view text) const override;
  std::string name() const override { return "byte-fallback"; }
};

/// Byte-level BPE from a `vocab.json` and `merges.txt` pair (RoBERTa and
/// CodeT5 format). Pre-tokenization approximates the GPT-2 pattern with
/// ASCII character classes; bytes >= 0x80 count as letters.
class BpeTokenizer : public Tokenizer {
 public:
  /// `path` is a directory holding both files, or the vocab.json file with
  /// merges.txt beside it. Throws DataError.
  static std::shared_ptr<BpeTokenizer> load(const std::filesystem::path& path);

  BpeTokenizer(std::unordered_map<std::string, int> vocab, std::vector<std::pair<std::string, std::string>> merges);

  std::vector<std::string> tokenize(std::string_view text) const override;
  std::string name() const override { return "bpe"; }

 private:
  std::vector<std::string> encode_word(const std::string& word) const;

  std::unordered_map<std::string, int> vocab_;
  std::map<std::pair<std::string, std::string>, int> ranks_;
};

/// Splits `text` into alternating plain segments and special tokens; each
/// element is tagged with whether it is special.
std::vector<std::pair<std::string_view, bool>> split_specials(std::string_view text);

/// The tokenizer named by COEDIT_TOKENIZER (a BPE vocabulary path), else the
/// byte-fallback tokenizer.
std::shared_ptr<const Tokenizer> default_tokenizer();

}  // namespace coedit
