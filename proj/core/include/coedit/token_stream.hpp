#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coedit {

/// One element of an encoded edit. Text tokens hold a (non-empty) fragment
/// of a source line; the other kinds are the special markers.
struct Token {
  enum class Kind { Text, Add, Del, Placeholder, Newline };

  Kind kind = Kind::Text;
  std::string text;     // Kind::Text only
  int placeholder = 0;  // Kind::Placeholder only, 1-based

  static Token make_text(std::string t) { return {Kind::Text, std::move(t), 0}; }
  static Token add() { return {Kind::Add, {}, 0}; }
  static Token del() { return {Kind::Del, {}, 0}; }
  static Token newline() { return {Kind::Newline, {}, 0}; }
  static Token make_placeholder(int k) { return {Kind::Placeholder, {}, k}; }

  bool is_special() const { return kind != Kind::Text && kind != Kind::Newline; }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Spelling of a special token, e.g. "<add>" or "<3>".
std::string special_spelling(const Token& token);

/// Serialized form of EncInput / EncOutput.
///
/// Canonical text rendering: special tokens are spelled `<add>`, `<del>`
/// and `<k>` with no separators, a Newline token is a single '\n', and a
/// text fragment runs to the end of its row. Special tokens are recognised
/// only at the start of a row or directly after another special token; a
/// text fragment that would itself read as a special token, possibly after
/// a run of backslashes, is written with one extra leading backslash.
///
/// A stream is canonical when its text tokens are non-empty, contain no
/// '\n', and are followed by a Newline or the end of the stream. For
/// canonical streams `parse(s.render()) == s` and for any string t
/// `parse(t).render() == t`.
class TokenStream {
 public:
  TokenStream() = default;
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const std::vector<Token>& tokens() const { return tokens_; }
  std::vector<Token>& tokens() { return tokens_; }

  void push(Token t) { tokens_.push_back(std::move(t)); }
  bool empty() const { return tokens_.empty(); }
  std::size_t size() const { return tokens_.size(); }

  std::string render() const;
  static TokenStream parse(std::string_view text);

  friend bool operator==(const TokenStream&, const TokenStream&) = default;

 private:
  std::vector<Token> tokens_;
};

/// Matches a special token at the start of `text`; returns it and its length.
std::optional<std::pair<Token, std::size_t>> match_special(std::string_view text);

}  // namespace coedit
