#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coedit/python/lexer.hpp"

namespace coedit::python {

/// One statement. Simple statements separated by ';' become separate
/// statements that share their line. Compound statements keep their header
/// tokens and own their suite, whether indented or on the header line.
struct Statement {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<PyToken> tokens;  // header (compound) or whole statement (simple)
  std::size_t colon = npos;     // index of the header colon in `tokens`
  std::vector<Statement> body;
  bool inline_body = false;     // suite written on the header line

  int first_line = 0;
  int header_last_line = 0;
  int last_line = 0;  // including the suite

  bool is_compound() const { return colon != npos; }

  /// First token text, skipping a leading "async".
  std::string_view keyword() const;

  bool is_def() const { return is_compound() && keyword() == "def"; }
  bool is_class() const { return is_compound() && keyword() == "class"; }
  bool is_decorator() const { return !tokens.empty() && tokens.front().is_op("@"); }

  /// Name defined by a def or class statement, empty otherwise.
  std::string defined_name() const;

  /// True for an expression statement made only of string literals.
  bool is_string_expression() const;
};

struct Module {
  std::vector<Statement> body;
  std::vector<std::string> lines;  // source lines, 1-based via line(i)

  const std::string& line(int i) const { return lines.at(static_cast<std::size_t>(i - 1)); }
};

/// Builds the statement tree. Throws ParseError on tokenizer errors, a
/// compound statement without a header colon, a missing or unexpected
/// indented block.
Module parse_module(std::string_view source);

/// Builds the statement tree of a code fragment without throwing; malformed
/// regions degrade to flat statements.
Module parse_fragment(std::string_view source);

/// Removes the common leading whitespace of all non-blank lines.
std::string dedent(std::string_view text);

}  // namespace coedit::python
