#pragma once

#include <string>
#include <string_view>

namespace coedit::python {

struct NormalizedCode {
  std::string code;
  bool normalized = false;  // false when the source did not parse and is returned as-is
};

/// Canonical, semantics-preserving rendering used for exact-match checks:
/// comments and docstrings are removed, keyword arguments of each call are
/// sorted by name (within runs not separated by positional or `**`
/// arguments), string literals use repr quoting, redundant trailing commas
/// are dropped, suites are split onto their own lines with 4-space indents,
/// and tokens are re-spaced by fixed rules. Idempotent.
NormalizedCode normalize_code(std::string_view source);

}  // namespace coedit::python
