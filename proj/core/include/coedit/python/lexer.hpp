#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coedit::python {

enum class TokenKind { Name, Number, String, Op, Comment, Newline, Nl, Indent, Dedent, EndMarker };

struct PyToken {
  TokenKind kind = TokenKind::Op;
  std::string text;
  int line = 0;  // 1-based
  int col = 0;   // 0-based byte offset
  int end_line = 0;
  int end_col = 0;

  bool is_op(std::string_view op) const { return kind == TokenKind::Op && text == op; }
  bool is_name(std::string_view name) const { return kind == TokenKind::Name && text == name; }
};

struct LexOptions {
  // Tolerate indentation and bracket errors instead of throwing; used for
  // best-effort analysis of code fragments.
  bool lenient = false;
};

/// Tokenizes Python 3 source following the rules of the reference
/// tokenizer: NEWLINE ends logical lines, NL marks blank lines and line
/// breaks inside brackets, INDENT/DEDENT track block structure. f-strings
/// are single String tokens. Throws ParseError unless lenient.
std::vector<PyToken> tokenize(std::string_view source, const LexOptions& options = {});

bool is_keyword(std::string_view word);

/// Keywords that can stand where a value is expected (True, False, None).
bool is_value_keyword(std::string_view word);

}  // namespace coedit::python
