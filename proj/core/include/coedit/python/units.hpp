#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coedit/python/syntax.hpp"

namespace coedit::python {

enum class UnitKind { Function, ClassRegion, ModuleRegion };

std::string_view to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string_view text);

struct UnitId {
  std::string module;  // dotted module path
  std::string name;    // qualified name, e.g. "C.m", "C.<head>", "<after f>"
  UnitKind kind = UnitKind::Function;

  friend bool operator==(const UnitId&, const UnitId&) = default;
  friend auto operator<=>(const UnitId&, const UnitId&) = default;
};

/// A function, a run of class-body statements, or a run of module-level
/// statements.
struct CodeUnit {
  UnitId id;
  int first_line = 0;  // 1-based, inclusive
  int last_line = 0;
  std::vector<std::string> lines;  // trailing whitespace removed
  std::string enclosing_class;     // qualified class name for methods and class regions
};

struct UnitPartition {
  std::vector<CodeUnit> units;
  // Decorator and header lines of classes whose body is an indented block;
  // they belong to no unit.
  std::vector<std::pair<int, int>> class_headers;
};

/// Splits a module into code units. Functions nested in classes are units
/// of their own; functions nested in functions stay inside the enclosing
/// function. Region units are named after the preceding definition in
/// their scope (`<head>` when there is none). Comment lines between units
/// join the following unit; trailing ones join the last unit.
UnitPartition partition_module(const Module& module, const std::string& module_path);

/// Parses and partitions. Throws ParseError.
std::vector<CodeUnit> extract_units(std::string_view source, const std::string& module_path = "");

/// "pkg/sub/mod.py" -> "pkg.sub.mod"; "pkg/__init__.py" -> "pkg".
std::string module_path_for(std::string_view file_path);

}  // namespace coedit::python
