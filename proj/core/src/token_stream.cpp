#include "coedit/token_stream.hpp"

#include <cctype>

namespace coedit {

std::string special_spelling(const Token& token) {
  switch (token.kind) {
    case Token::Kind::Add:
      return "<add>";
    case Token::Kind::Del:
      return "<del>";
    case Token::Kind::Placeholder:
      return "<" + std::to_string(token.placeholder) + ">";
    case Token::Kind::Newline:
      return "\n";
    case Token::Kind::Text:
      break;
  }
  return token.text;
}

std::optional<std::pair<Token, std::size_t>> match_special(std::string_view text) {
  if (text.starts_with("<add>")) return std::pair{Token::add(), std::size_t{5}};
  if (text.starts_with("<del>")) return std::pair{Token::del(), std::size_t{5}};
  if (text.size() < 3 || text[0] != '<') return std::nullopt;
  std::size_t i = 1;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  // Placeholders are 1-based without leading zeros, so "<0>" and "<01>" stay text.
  if (i == 1 || i >= text.size() || text[i] != '>' || text[1] == '0' || i > 10) return std::nullopt;
  int k = std::stoi(std::string(text.substr(1, i - 1)));
  return std::pair{Token::make_placeholder(k), i + 1};
}

namespace {

// True for text of the form `\\*<special>...`; such text gets one extra
// leading backslash when rendered.
bool needs_escape(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && text[i] == '\\') ++i;
  return match_special(text.substr(i)).has_value();
}

}  // namespace

std::string TokenStream::render() const {
  std::string out;
  for (const auto& t : tokens_) {
    if (t.kind == Token::Kind::Text) {
      if (needs_escape(t.text)) out.push_back('\\');
      out += t.text;
    } else {
      out += special_spelling(t);
    }
  }
  return out;
}

TokenStream TokenStream::parse(std::string_view text) {
  TokenStream stream;
  std::size_t pos = 0;
  bool may_special = true;
  while (pos < text.size()) {
    if (text[pos] == '\n') {
      stream.push(Token::newline());
      ++pos;
      may_special = true;
      continue;
    }
    if (may_special) {
      if (auto special = match_special(text.substr(pos))) {
        stream.push(std::move(special->first));
        pos += special->second;
        continue;
      }
    }
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view fragment = text.substr(pos, end - pos);
    if (may_special && fragment.front() == '\\' && needs_escape(fragment)) fragment.remove_prefix(1);
    stream.push(Token::make_text(std::string(fragment)));
    pos = end;
    may_special = false;
  }
  return stream;
}

}  // namespace coedit
