#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coedit/python/units.hpp"

namespace coedit::python {

/// A name bound by an import statement.
struct ImportBinding {
  std::string local;   // bound name; empty for star imports
  std::string module;  // absolute dotted module as written (relative imports resolved)
  std::string symbol;  // imported attribute for "from m import s"; empty for "import m"
  bool star = false;
  bool dotted_root = false;  // "import a.b" binds "a" to the package root
};

/// Import bindings of a statement, with relative modules resolved against
/// `current_module`.
std::vector<ImportBinding> import_bindings(const Statement& s, const std::string& current_module, bool is_package);

struct UsageSite {
  enum class Kind { Function, Variable, ClassMember };

  std::string module;  // defining module
  std::string symbol;  // "f", "C", "C.attr", "CONST"
  Kind kind = Kind::Function;
  std::string definition_text;

  friend bool operator==(const UsageSite&, const UsageSite&) = default;
};

std::string_view to_string(UsageSite::Kind kind);
UsageSite::Kind usage_kind_from_string(std::string_view text);

/// Definitions used by a unit, grouped by defining module (modules sorted by
/// path) with entries in first-use order within each group.
struct SignatureDoc {
  std::vector<UsageSite> entries;

  bool empty() const { return entries.empty(); }

  /// One "# module: <path>" header per module followed by its definitions;
  /// class members are listed under a "class C:" line.
  std::string render() const;
};

/// Static, project-local index of module-level definitions, class members
/// and imports. Built once, then queried concurrently.
class ProjectIndex {
 public:
  /// Files keyed by repository-relative path; non-".py" files are ignored
  /// and files that fail to parse are skipped (see skipped()).
  static ProjectIndex build(const std::map<std::string, std::string>& files);

  /// Adds or replaces one module. Returns false, leaving the module absent,
  /// when the source does not parse.
  bool add_module(const std::string& module_path, std::string_view source, bool is_package = false);
  void remove_module(const std::string& module_path) { modules_.erase(module_path); }

  std::vector<UsageSite> find_usages(const CodeUnit& unit) const;
  SignatureDoc build_signature_doc(const CodeUnit& unit) const;

  /// Resolves a dotted module name to a project module: exact match, else
  /// the lexicographically first module ending in "." + name.
  std::optional<std::string> resolve_module(std::string_view name) const;

  bool has_module(const std::string& module_path) const { return modules_.contains(module_path); }
  const std::vector<std::string>& skipped() const { return skipped_; }

  struct ClassInfo {
    std::string header;
    std::vector<std::string> bases;
    std::map<std::string, std::pair<int, UsageSite>> members;  // first definition by line
  };

  struct ModuleInfo {
    bool is_package = false;
    std::map<std::string, std::pair<int, UsageSite>> globals;  // functions, classes, variables
    std::map<std::string, ClassInfo> classes;
    std::vector<ImportBinding> imports;
  };

 private:
  std::optional<UsageSite> resolve_chain(const std::string& module, const std::vector<std::string>& parts,
                                         int depth) const;
  std::optional<UsageSite> resolve_member(const std::string& module, const std::string& cls,
                                          const std::string& member, int depth) const;

  std::map<std::string, ModuleInfo> modules_;
  std::vector<std::string> skipped_;
};

}  // namespace coedit::python
