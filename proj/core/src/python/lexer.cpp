#include "coedit/python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "coedit/error.hpp"

namespace coedit::python {

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 35> keywords = {
      "False", "None",   "True",    "and",      "as",   "assert", "async",  "await",    "break",
      "class", "continue", "def",   "del",      "elif", "else",   "except", "finally",  "for",
      "from",  "global", "if",      "import",   "in",   "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise",   "return",   "try",  "while",  "with",   "yield"};
  return std::find(keywords.begin(), keywords.end(), word) != keywords.end();
}

bool is_value_keyword(std::string_view word) { return word == "True" || word == "False" || word == "None"; }

namespace {

constexpr std::array<std::string_view, 5> kThreeCharOps = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kTwoCharOps = {"**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", ":=",
                                                         "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOneCharOps = "()[]{},:;.@=+-*/%&|^~<>";

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" || lower == "rb" ||
         lower == "fr" || lower == "rf";
}

class Lexer {
 public:
  Lexer(std::string_view src, const LexOptions& options) : src_(src), options_(options) {}

  std::vector<PyToken> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && brackets_.empty()) {
        if (!handle_indentation()) continue;
      }
      at_line_start_ = false;
      scan_token();
    }
    if (!brackets_.empty()) {
      fail("unexpected end of file inside brackets");
      brackets_.clear();
    }
    if (line_has_tokens_) emit(TokenKind::Newline, "", line_, col());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", line_, 0);
    }
    emit(TokenKind::EndMarker, "", line_, 0);
    return std::move(tokens_);
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_begin_); }

  void fail(const std::string& what) {
    if (!options_.lenient) throw ParseError(what, line_, col());
  }

  void emit(TokenKind kind, std::string text, int line, int column) {
    PyToken t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line;
    t.col = column;
    t.end_line = line_;
    t.end_col = col();
    tokens_.push_back(std::move(t));
  }

  void newline_advance() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
    ++pos_;
    ++line_;
    line_begin_ = pos_;
  }

  bool at_newline() const { return src_[pos_] == '\n' || src_[pos_] == '\r'; }

  // Returns false when the line was blank or comment-only and has been consumed.
  bool handle_indentation() {
    int width = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (c == '\f') {
        width = 0;
      } else {
        break;
      }
      ++pos_;
    }
    if (pos_ >= src_.size()) return false;
    if (at_newline()) {
      const int l = line_;
      const int c = col();
      newline_advance();
      tokens_.push_back({TokenKind::Nl, "", l, c, l, c + 1});
      return false;
    }
    if (src_[pos_] == '#') {
      scan_comment();
      if (pos_ < src_.size()) {
        const int l = line_;
        const int c = col();
        newline_advance();
        tokens_.push_back({TokenKind::Nl, "", l, c, l, c + 1});
      }
      return false;
    }
    if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
      // A continuation at the start of a line keeps the current indentation.
      width = indents_.back();
    }
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(TokenKind::Indent, "", line_, 0);
    } else if (width < indents_.back()) {
      while (indents_.size() > 1 && width < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", line_, 0);
      }
      if (width != indents_.back()) {
        fail("unindent does not match any outer indentation level");
        indents_.push_back(width);
      }
    }
    return true;
  }

  void scan_comment() {
    const std::size_t start = pos_;
    const int c = col();
    while (pos_ < src_.size() && !at_newline()) ++pos_;
    emit(TokenKind::Comment, std::string(src_.substr(start, pos_ - start)), line_, c);
  }

  void scan_token() {
    const char ch = src_[pos_];
    const auto uch = static_cast<unsigned char>(ch);
    if (ch == ' ' || ch == '\t' || ch == '\f') {
      ++pos_;
      return;
    }
    if (at_newline()) {
      const int l = line_;
      const int c = col();
      const bool logical = brackets_.empty() && line_has_tokens_;
      newline_advance();
      tokens_.push_back({logical ? TokenKind::Newline : TokenKind::Nl, "", l, c, l, c + 1});
      if (logical) line_has_tokens_ = false;
      at_line_start_ = true;
      return;
    }
    if (ch == '#') {
      scan_comment();
      return;
    }
    if (ch == '\\') {
      if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        ++pos_;
        newline_advance();
        return;
      }
      fail("unexpected character after line continuation");
      ++pos_;
      return;
    }
    line_has_tokens_ = true;
    if (is_ident_start(uch)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      std::string_view word = src_.substr(start, pos_ - start);
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') && is_string_prefix(word)) {
        scan_string(start);
        return;
      }
      emit(TokenKind::Name, std::string(word), line_, static_cast<int>(start - line_begin_));
      return;
    }
    if (std::isdigit(uch) || (ch == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      scan_number();
      return;
    }
    if (ch == '\'' || ch == '"') {
      scan_string(pos_);
      return;
    }
    scan_operator();
  }

  void scan_number() {
    const std::size_t start = pos_;
    const int c = col();
    const bool radix = src_[pos_] == '0' && pos_ + 1 < src_.size() &&
                       std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos;
    if (radix) {
      pos_ += 2;
      while (pos_ < src_.size() && (std::isxdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    } else {
      auto digits = [&] {
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      };
      digits();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          digits();
        } else {
          pos_ = save;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    if (pos_ < src_.size() && is_ident_start(static_cast<unsigned char>(src_[pos_]))) fail("invalid number literal");
    emit(TokenKind::Number, std::string(src_.substr(start, pos_ - start)), line_, c);
  }

  void scan_string(std::size_t start) {
    const int start_line = line_;
    const int start_col = static_cast<int>(start - line_begin_);
    const char quote = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    while (true) {
      if (pos_ >= src_.size()) {
        fail(triple ? "unterminated triple-quoted string" : "unterminated string literal");
        break;
      }
      const char c = src_[pos_];
      if (c == '\\') {
        ++pos_;
        if (pos_ < src_.size()) {
          if (at_newline()) {
            newline_advance();
          } else {
            ++pos_;
          }
        }
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!triple) {
          fail("unterminated string literal");
          break;
        }
        newline_advance();
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    PyToken t;
    t.kind = TokenKind::String;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.line = start_line;
    t.col = start_col;
    t.end_line = line_;
    t.end_col = col();
    tokens_.push_back(std::move(t));
  }

  void scan_operator() {
    const int c = col();
    std::string_view rest = src_.substr(pos_);
    for (auto op : kThreeCharOps) {
      if (rest.starts_with(op)) return push_op(op, c);
    }
    for (auto op : kTwoCharOps) {
      if (rest.starts_with(op)) return push_op(op, c);
    }
    if (kOneCharOps.find(rest.front()) != std::string_view::npos) return push_op(rest.substr(0, 1), c);
    fail(std::string("invalid character '") + rest.front() + "'");
    ++pos_;
  }

  void push_op(std::string_view op, int c) {
    pos_ += op.size();
    if (op == "(" || op == "[" || op == "{") {
      brackets_.push_back(op.front());
    } else if (op == ")" || op == "]" || op == "}") {
      const char open = op == ")" ? '(' : (op == "]" ? '[' : '{');
      if (brackets_.empty() || brackets_.back() != open) {
        fail("unmatched '" + std::string(op) + "'");
      } else {
        brackets_.pop_back();
      }
    }
    emit(TokenKind::Op, std::string(op), line_, c);
  }

  std::string_view src_;
  LexOptions options_;
  std::size_t pos_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_{0};
  std::vector<char> brackets_;
  std::vector<PyToken> tokens_;
};

}  // namespace

std::vector<PyToken> tokenize(std::string_view source, const LexOptions& options) {
  return Lexer(source, options).run();
}

}  // namespace coedit::python
