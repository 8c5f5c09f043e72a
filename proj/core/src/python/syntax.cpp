#include "coedit/python/syntax.hpp"

#include <algorithm>
#include <array>

#include "coedit/error.hpp"
#include "coedit/line_diff.hpp"

namespace coedit::python {

std::string_view Statement::keyword() const {
  if (tokens.empty()) return {};
  if (tokens.front().is_name("async") && tokens.size() > 1) return tokens[1].text;
  return tokens.front().text;
}

std::string Statement::defined_name() const {
  if (!is_def() && !is_class()) return {};
  const std::size_t at = tokens.front().is_name("async") ? 2 : 1;
  return at < tokens.size() && tokens[at].kind == TokenKind::Name ? tokens[at].text : std::string{};
}

bool Statement::is_string_expression() const {
  if (is_compound() || tokens.empty()) return false;
  return std::all_of(tokens.begin(), tokens.end(), [](const PyToken& t) { return t.kind == TokenKind::String; });
}

namespace {

bool is_compound_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 12> words = {"if",   "elif", "else",    "for",  "while", "try",
                                                             "except", "finally", "with", "def", "class", "async"};
  return std::find(words.begin(), words.end(), word) != words.end();
}

std::size_t top_level_colon(const std::vector<PyToken>& tokens) {
  int depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != TokenKind::Op) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
    if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
    if (depth == 0 && t.text == ":") return i;
  }
  return Statement::npos;
}

std::vector<std::vector<PyToken>> split_semicolons(std::vector<PyToken> tokens) {
  std::vector<std::vector<PyToken>> out(1);
  int depth = 0;
  for (auto& t : tokens) {
    if (t.kind == TokenKind::Op) {
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ";") {
        out.emplace_back();
        continue;
      }
    }
    out.back().push_back(std::move(t));
  }
  std::erase_if(out, [](const auto& s) { return s.empty(); });
  return out;
}

Statement simple(std::vector<PyToken> tokens) {
  Statement s;
  s.first_line = tokens.front().line;
  s.header_last_line = std::max_element(tokens.begin(), tokens.end(), [](auto& a, auto& b) {
                         return a.end_line < b.end_line;
                       })->end_line;
  s.last_line = s.header_last_line;
  s.tokens = std::move(tokens);
  return s;
}

class Parser {
 public:
  Parser(std::vector<PyToken> tokens, bool lenient) : tokens_(std::move(tokens)), lenient_(lenient) {}

  std::vector<Statement> block(bool nested) {
    std::vector<Statement> out;
    while (pos_ < tokens_.size()) {
      const auto& t = tokens_[pos_];
      if (t.kind == TokenKind::EndMarker) break;
      if (t.kind == TokenKind::Dedent) {
        if (nested) {
          ++pos_;
          return out;
        }
        ++pos_;
        continue;
      }
      if (t.kind == TokenKind::Nl || t.kind == TokenKind::Comment || t.kind == TokenKind::Newline) {
        ++pos_;
        continue;
      }
      if (t.kind == TokenKind::Indent) {
        fail("unexpected indent", t);
        ++pos_;
        auto inner = block(true);
        std::move(inner.begin(), inner.end(), std::back_inserter(out));
        continue;
      }
      statement(out);
    }
    return out;
  }

 private:
  void fail(const std::string& what, const PyToken& at) {
    if (!lenient_) throw ParseError(what, at.line, at.col);
  }

  std::vector<PyToken> logical_line() {
    std::vector<PyToken> line;
    while (pos_ < tokens_.size()) {
      auto& t = tokens_[pos_];
      if (t.kind == TokenKind::Newline) {
        ++pos_;
        break;
      }
      if (t.kind == TokenKind::EndMarker || t.kind == TokenKind::Indent || t.kind == TokenKind::Dedent) break;
      if (t.kind != TokenKind::Comment && t.kind != TokenKind::Nl) line.push_back(t);
      ++pos_;
    }
    return line;
  }

  bool next_is_indent() {
    while (pos_ < tokens_.size() &&
           (tokens_[pos_].kind == TokenKind::Nl || tokens_[pos_].kind == TokenKind::Comment)) {
      ++pos_;
    }
    return pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::Indent;
  }

  void statement(std::vector<Statement>& out) {
    std::vector<PyToken> line = logical_line();
    if (line.empty()) return;
    const PyToken head = line.front();

    std::size_t colon = Statement::npos;
    const bool keyword_header = is_compound_keyword(head.text) && head.kind == TokenKind::Name;
    if (keyword_header) {
      colon = top_level_colon(line);
      if (colon == Statement::npos) {
        fail("expected ':'", line.back());
      }
    } else if (line.back().is_op(":") && (head.is_name("match") || head.is_name("case"))) {
      colon = line.size() - 1;
    }

    if (colon == Statement::npos) {
      if (next_is_indent()) {
        fail("unexpected indent", tokens_[pos_]);
      }
      for (auto& part : split_semicolons(std::move(line))) out.push_back(simple(std::move(part)));
      return;
    }

    Statement s;
    s.first_line = head.line;
    s.header_last_line = line[colon].end_line;
    s.colon = colon;
    if (colon + 1 < line.size()) {
      s.inline_body = true;
      std::vector<PyToken> suite(line.begin() + static_cast<std::ptrdiff_t>(colon) + 1, line.end());
      line.resize(colon + 1);
      for (auto& part : split_semicolons(std::move(suite))) s.body.push_back(simple(std::move(part)));
      if (next_is_indent()) fail("unexpected indent", tokens_[pos_]);
    } else if (next_is_indent()) {
      ++pos_;
      s.body = block(true);
    } else {
      fail("expected an indented block", line.back());
    }
    s.tokens = std::move(line);
    s.last_line = s.header_last_line;
    for (const auto& b : s.body) s.last_line = std::max(s.last_line, b.last_line);
    out.push_back(std::move(s));
  }

  std::vector<PyToken> tokens_;
  bool lenient_;
  std::size_t pos_ = 0;
};

Module build(std::string_view source, bool lenient) {
  Module m;
  m.lines = split_lines(source);
  LexOptions options;
  options.lenient = lenient;
  Parser parser(tokenize(source, options), lenient);
  m.body = parser.block(false);
  return m;
}

}  // namespace

Module parse_module(std::string_view source) { return build(source, false); }

Module parse_fragment(std::string_view source) { return build(source, true); }

std::string dedent(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t common = std::string::npos;
  std::string prefix;
  for (const auto& l : lines) {
    const std::size_t indent = l.find_first_not_of(" \t");
    if (indent == std::string::npos) continue;
    if (common == std::string::npos) {
      prefix = l.substr(0, indent);
      common = indent;
      continue;
    }
    std::size_t k = 0;
    while (k < common && k < indent && l[k] == prefix[k]) ++k;
    common = k;
  }
  if (common == std::string::npos || common == 0) return std::string(text);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    if (lines[i].size() >= common) out += lines[i].substr(common);
  }
  if (!text.empty() && text.back() == '\n') out.push_back('\n');
  return out;
}

}  // namespace coedit::python
