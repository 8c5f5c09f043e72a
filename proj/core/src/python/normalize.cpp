#include "coedit/python/normalize.hpp"

#include <algorithm>
#include <optional>

#include "coedit/error.hpp"
#include "coedit/python/syntax.hpp"

namespace coedit::python {

namespace {

using Tokens = std::vector<PyToken>;

bool is_open(const PyToken& t) { return t.kind == TokenKind::Op && (t.text == "(" || t.text == "[" || t.text == "{"); }
bool is_close(const PyToken& t) { return t.kind == TokenKind::Op && (t.text == ")" || t.text == "]" || t.text == "}"); }

PyToken op(std::string text) {
  PyToken t;
  t.kind = TokenKind::Op;
  t.text = std::move(text);
  return t;
}

// ---- string literals ------------------------------------------------------

struct StringLiteral {
  bool bytes = false;
  std::u32string value;  // bytes are stored one byte per element
};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::u32string utf8_code_points(std::string_view text) {
  std::u32string out;
  for (std::size_t i = 0; i < text.size();) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = lead >= 0xF0 ? 3 : lead >= 0xE0 ? 2 : lead >= 0xC0 ? 1 : 0;
    if (i + extra >= text.size()) extra = 0;
    char32_t cp = extra == 0 ? lead : static_cast<char32_t>(lead & (0x3F >> extra));
    for (std::size_t k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

/// Decodes a non-f string token; nullopt for f-strings and `\N{...}` escapes.
std::optional<StringLiteral> decode_string(const std::string& token) {
  std::size_t p = 0;
  bool raw = false;
  StringLiteral lit;
  while (p < token.size() && token[p] != '\'' && token[p] != '"') {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(token[p])));
    if (c == 'f') return std::nullopt;
    if (c == 'r') raw = true;
    if (c == 'b') lit.bytes = true;
    ++p;
  }
  const std::size_t quote_len = token.compare(p, 3, std::string(3, token[p])) == 0 && token.size() >= p + 6 ? 3 : 1;
  const std::string_view body(token.data() + p + quote_len, token.size() - p - 2 * quote_len);

  const std::u32string chars = lit.bytes ? std::u32string(body.begin(), body.end()) : utf8_code_points(body);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const char32_t c = chars[i];
    if (c != U'\\' || raw || i + 1 >= chars.size()) {
      lit.value.push_back(c);
      continue;
    }
    const char32_t e = chars[++i];
    auto read_hex = [&](std::size_t digits) -> std::optional<char32_t> {
      char32_t v = 0;
      for (std::size_t k = 0; k < digits; ++k) {
        if (i + 1 >= chars.size() || chars[i + 1] > 0x7F) return std::nullopt;
        const int h = hex_value(static_cast<char>(chars[i + 1]));
        if (h < 0) return std::nullopt;
        v = v * 16 + static_cast<char32_t>(h);
        ++i;
      }
      return v;
    };
    switch (e) {
      case U'\n':
        break;
      case U'\\': case U'\'': case U'"':
        lit.value.push_back(e);
        break;
      case U'a': lit.value.push_back(7); break;
      case U'b': lit.value.push_back(8); break;
      case U'f': lit.value.push_back(12); break;
      case U'n': lit.value.push_back(10); break;
      case U'r': lit.value.push_back(13); break;
      case U't': lit.value.push_back(9); break;
      case U'v': lit.value.push_back(11); break;
      case U'x': {
        auto v = read_hex(2);
        if (!v) return std::nullopt;
        lit.value.push_back(*v);
        break;
      }
      case U'u': case U'U': {
        if (lit.bytes) {
          lit.value.push_back(U'\\');
          lit.value.push_back(e);
          break;
        }
        auto v = read_hex(e == U'u' ? 4 : 8);
        if (!v) return std::nullopt;
        lit.value.push_back(*v);
        break;
      }
      case U'N':
        if (lit.bytes) {
          lit.value.push_back(U'\\');
          lit.value.push_back(e);
          break;
        }
        return std::nullopt;
      default:
        if (e >= U'0' && e <= U'7') {
          char32_t v = e - U'0';
          for (int k = 0; k < 2 && i + 1 < chars.size() && chars[i + 1] >= U'0' && chars[i + 1] <= U'7'; ++k) {
            v = v * 8 + (chars[++i] - U'0');
          }
          lit.value.push_back(v);
        } else {
          lit.value.push_back(U'\\');
          lit.value.push_back(e);
        }
    }
  }
  return lit;
}

std::string hex_escape(char32_t c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out = "\\x";
  out.push_back(digits[(c >> 4) & 0xF]);
  out.push_back(digits[c & 0xF]);
  return out;
}

/// Python repr() of the literal's value.
std::string repr(const StringLiteral& lit) {
  const bool has_single = lit.value.find(U'\'') != std::u32string::npos;
  const bool has_double = lit.value.find(U'"') != std::u32string::npos;
  const char32_t quote = has_single && !has_double ? U'"' : U'\'';
  std::string out = lit.bytes ? "b" : "";
  out.push_back(static_cast<char>(quote));
  for (const char32_t c : lit.value) {
    if (c == U'\\') out += "\\\\";
    else if (c == quote) out += quote == U'\'' ? "\\'" : "\\\"";
    else if (c == U'\t') out += "\\t";
    else if (c == U'\n') out += "\\n";
    else if (c == U'\r') out += "\\r";
    else if (c < 0x20 || c == 0x7F || (c >= 0x80 && c <= 0xA0 && !lit.bytes)) out += hex_escape(c);
    else if (lit.bytes && c >= 0x80) out += hex_escape(c);
    else if (c >= 0xD800 && c <= 0xDFFF) {
      out += "\\ud";
      static constexpr char digits[] = "0123456789abcdef";
      out.push_back(digits[(c >> 8) & 0xF]);
      out.push_back(digits[(c >> 4) & 0xF]);
      out.push_back(digits[c & 0xF]);
    } else append_utf8(out, c);
  }
  out.push_back(static_cast<char>(quote));
  return out;
}

/// Merges implicitly concatenated literals of the same type and re-quotes
/// every decodable literal.
Tokens canonical_strings(const Tokens& tokens) {
  Tokens out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind != TokenKind::String) {
      out.push_back(tokens[i]);
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && tokens[j + 1].kind == TokenKind::String) ++j;
    std::vector<std::optional<StringLiteral>> decoded;
    for (std::size_t k = i; k <= j; ++k) decoded.push_back(decode_string(tokens[k].text));
    const bool mergeable = std::all_of(decoded.begin(), decoded.end(), [&](const auto& d) {
      return d && d->bytes == decoded.front()->bytes;
    });
    if (mergeable) {
      StringLiteral merged = *decoded.front();
      for (std::size_t k = 1; k < decoded.size(); ++k) merged.value += decoded[k]->value;
      PyToken t = tokens[i];
      t.text = repr(merged);
      out.push_back(std::move(t));
    } else {
      for (std::size_t k = i; k <= j; ++k) {
        PyToken t = tokens[k];
        if (decoded[k - i]) t.text = repr(*decoded[k - i]);
        out.push_back(std::move(t));
      }
    }
    i = j;
  }
  return out;
}

// ---- brackets: keyword sorting and trailing commas ------------------------

bool callable_before(const Tokens& out) {
  if (out.empty()) return false;
  const PyToken& prev = out.back();
  if (prev.kind == TokenKind::Name) {
    if (is_keyword(prev.text)) return false;
    if (out.size() >= 2 && (out[out.size() - 2].is_name("def") || out[out.size() - 2].is_name("class"))) return false;
    return true;
  }
  return prev.kind == TokenKind::String || prev.is_op(")") || prev.is_op("]");
}

bool is_keyword_argument(const Tokens& element) {
  return element.size() >= 2 && element[0].kind == TokenKind::Name && !is_keyword(element[0].text) &&
         element[1].is_op("=");
}

Tokens rewrite_brackets(const Tokens& tokens, std::size_t begin, std::size_t end) {
  Tokens out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!is_open(tokens[i])) {
      out.push_back(tokens[i]);
      continue;
    }
    std::size_t j = i + 1;
    for (int depth = 1; j < end; ++j) {
      if (is_open(tokens[j])) ++depth;
      if (is_close(tokens[j]) && --depth == 0) break;
    }
    const bool paren = tokens[i].text == "(";
    const bool call = paren && callable_before(out);
    const bool subscript = tokens[i].text == "[" && callable_before(out);

    std::vector<Tokens> elements;
    if (j > i + 1) {
      elements.emplace_back();
      int depth = 0;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (is_open(tokens[k])) ++depth;
        if (is_close(tokens[k])) --depth;
        if (depth == 0 && tokens[k].is_op(",")) {
          elements.emplace_back();
          continue;
        }
        elements.back().push_back(tokens[k]);
      }
    }
    for (auto& e : elements) e = rewrite_brackets(e, 0, e.size());

    if (elements.size() >= 2 && elements.back().empty()) {
      const bool single_tuple = elements.size() == 2 && ((paren && !call) || subscript);
      if (!single_tuple) elements.pop_back();
    }
    if (call) {
      for (std::size_t k = 0; k < elements.size();) {
        std::size_t run = k;
        while (run < elements.size() && is_keyword_argument(elements[run])) ++run;
        std::stable_sort(elements.begin() + static_cast<std::ptrdiff_t>(k),
                         elements.begin() + static_cast<std::ptrdiff_t>(run),
                         [](const Tokens& a, const Tokens& b) { return a[0].text < b[0].text; });
        k = run == k ? k + 1 : run;
      }
    }

    out.push_back(tokens[i]);
    for (std::size_t k = 0; k < elements.size(); ++k) {
      if (k > 0) out.push_back(op(","));
      out.insert(out.end(), elements[k].begin(), elements[k].end());
    }
    out.push_back(j < end ? tokens[j] : op(std::string(1, tokens[i].text == "(" ? ')' : tokens[i].text == "[" ? ']' : '}')));
    i = j;
  }
  return out;
}

// ---- spacing ----------------------------------------------------------------

bool is_unary_candidate(const PyToken& t) {
  return t.kind == TokenKind::Op && (t.text == "-" || t.text == "+" || t.text == "~" || t.text == "*" || t.text == "**");
}

bool operand_end(const PyToken& t) {
  if (t.kind == TokenKind::Name) return !is_keyword(t.text) || is_value_keyword(t.text);
  if (t.kind == TokenKind::Number || t.kind == TokenKind::String) return true;
  return is_close(t);
}

std::string render_line(const Tokens& tokens) {
  std::string out;
  std::vector<char> brackets;
  bool lambda_params = false;
  const bool import_statement = !tokens.empty() && (tokens[0].is_name("from") || tokens[0].is_name("import"));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const PyToken& cur = tokens[i];
    if (i > 0) {
      const PyToken& prev = tokens[i - 1];
      const bool depth0 = brackets.empty();
      bool space = true;
      if (is_open(prev) || is_close(cur) || cur.is_op(",") || cur.is_op(";")) {
        space = false;
      } else if (prev.is_op(",")) {
        space = true;
      } else if (cur.is_op(":")) {
        space = false;
      } else if (prev.is_op(":")) {
        space = brackets.empty() || brackets.back() != '[';
      } else if (cur.is_op(".") || prev.is_op(".")) {
        space = (import_statement && (prev.is_name("from") || cur.is_name("import"))) ||
                (prev.kind == TokenKind::Number && cur.is_op("."));
      } else if (is_open(cur)) {
        space = !(operand_end(prev) && !(prev.kind == TokenKind::Name && is_value_keyword(prev.text))) &&
                !(is_unary_candidate(prev) && (i < 2 || !operand_end(tokens[i - 2])));
      } else if ((cur.is_op("=") || prev.is_op("=")) && (!depth0 || lambda_params)) {
        space = false;
      } else if (i == 1 && prev.is_op("@")) {
        space = false;
      } else if (is_unary_candidate(prev) && (i < 2 || !operand_end(tokens[i - 2]))) {
        space = false;
      }
      if (space) out.push_back(' ');
    }
    out += cur.text;
    if (cur.is_name("lambda")) lambda_params = true;
    if (cur.is_op(":")) lambda_params = false;
    if (is_open(cur)) brackets.push_back(cur.text.front());
    if (is_close(cur) && !brackets.empty()) brackets.pop_back();
  }
  return out;
}

// ---- layout -------------------------------------------------------------------

void emit(const std::vector<Statement>& body, bool docstring_scope, int level, std::vector<std::string>& lines) {
  std::size_t first = 0;
  if (docstring_scope) {
    while (first < body.size() && body[first].is_string_expression()) ++first;
  }
  const std::string indent(static_cast<std::size_t>(level) * 4, ' ');
  for (std::size_t k = first; k < body.size(); ++k) {
    const Statement& s = body[k];
    const Tokens strings = canonical_strings(s.tokens);
    lines.push_back(indent + render_line(rewrite_brackets(strings, 0, strings.size())));
    if (s.is_compound()) {
      const std::size_t before = lines.size();
      emit(s.body, s.is_def() || s.is_class(), level + 1, lines);
      if (lines.size() == before) lines.push_back(indent + "    pass");
    }
  }
}

}  // namespace

NormalizedCode normalize_code(std::string_view source) {
  const std::string text = dedent(source);
  Module module;
  try {
    module = parse_module(text);
  } catch (const ParseError&) {
    return {std::string(source), false};
  }
  std::vector<std::string> lines;
  emit(module.body, true, 0, lines);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += lines[i];
  }
  return {out, true};
}

}  // namespace coedit::python
