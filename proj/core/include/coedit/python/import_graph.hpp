#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coedit/python/project_index.hpp"

namespace coedit::python {

/// Module-level import dependencies between project modules.
struct ImportGraph {
  std::set<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;  // importer -> imported

  bool has_edge(const std::string& from, const std::string& to) const;
};

/// Import bindings of every import statement in a module, nested ones
/// included.
std::vector<ImportBinding> module_imports(const Module& module, const std::string& module_path, bool is_package);

/// Exact match, else the lexicographically first module ending in "." + name.
std::optional<std::string> resolve_module_name(const std::set<std::string>& modules, std::string_view name);

/// Graph over the keys of `imports`. `from m import s` points at module
/// m.s when it exists, else at m; imports resolving outside the key set are
/// ignored.
ImportGraph build_import_graph(const std::map<std::string, std::vector<ImportBinding>>& imports);

/// Builds the graph from files keyed by repository-relative path;
/// unparsable files become isolated nodes.
ImportGraph import_graph(const std::map<std::string, std::string>& files);

/// Strongly connected components condensed and ordered topologically with
/// imported modules first. Ties between ready components, and modules
/// within one component, are broken by lexicographic path.
std::vector<std::string> import_order(const ImportGraph& graph);

}  // namespace coedit::python
