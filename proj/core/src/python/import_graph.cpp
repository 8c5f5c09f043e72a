#include "coedit/python/import_graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "coedit/error.hpp"
#include "coedit/python/project_index.hpp"

namespace coedit::python {

bool ImportGraph::has_edge(const std::string& from, const std::string& to) const {
  auto it = edges.find(from);
  return it != edges.end() && it->second.contains(to);
}

std::vector<ImportBinding> module_imports(const Module& module, const std::string& module_path, bool is_package) {
  std::vector<ImportBinding> out;
  std::function<void(const std::vector<Statement>&)> walk = [&](const std::vector<Statement>& body) {
    for (const auto& s : body) {
      if (s.is_compound()) {
        walk(s.body);
        continue;
      }
      for (auto& b : import_bindings(s, module_path, is_package)) out.push_back(std::move(b));
    }
  };
  walk(module.body);
  return out;
}

std::optional<std::string> resolve_module_name(const std::set<std::string>& modules, std::string_view name) {
  if (name.empty()) return std::nullopt;
  const std::string key(name);
  if (modules.contains(key)) return key;
  const std::string suffix = "." + key;
  for (const auto& m : modules) {
    if (m.ends_with(suffix)) return m;
  }
  return std::nullopt;
}

ImportGraph build_import_graph(const std::map<std::string, std::vector<ImportBinding>>& imports) {
  ImportGraph graph;
  for (const auto& [module, bindings] : imports) graph.nodes.insert(module);
  for (const auto& [module, bindings] : imports) {
    for (const auto& b : bindings) {
      std::optional<std::string> target;
      if (!b.symbol.empty()) target = resolve_module_name(graph.nodes, b.module + "." + b.symbol);
      if (!target) target = resolve_module_name(graph.nodes, b.module);
      if (target && *target != module) graph.edges[module].insert(*target);
    }
  }
  return graph;
}

ImportGraph import_graph(const std::map<std::string, std::string>& files) {
  std::map<std::string, std::vector<ImportBinding>> imports;
  for (const auto& [path, text] : files) {
    if (!path.ends_with(".py")) continue;
    const std::string module = module_path_for(path);
    auto& bindings = imports[module];
    try {
      bindings = module_imports(parse_module(text), module, path.ends_with("__init__.py"));
    } catch (const ParseError&) {
      bindings.clear();
    }
  }
  return build_import_graph(imports);
}

std::vector<std::string> import_order(const ImportGraph& graph) {
  // Tarjan's algorithm over nodes in sorted order.
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::map<std::string, int> component;
  std::vector<std::vector<std::string>> components;
  int counter = 0;

  std::function<void(const std::string&)> connect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    if (auto it = graph.edges.find(v); it != graph.edges.end()) {
      for (const auto& w : it->second) {
        if (!graph.nodes.contains(w)) continue;
        if (!index.contains(w)) {
          connect(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.contains(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> members;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component[w] = static_cast<int>(components.size());
        members.push_back(w);
      } while (w != v);
      std::sort(members.begin(), members.end());
      components.push_back(std::move(members));
    }
  };
  for (const auto& v : graph.nodes) {
    if (!index.contains(v)) connect(v);
  }

  // Kahn over the condensation: a component is ready once every component it
  // imports has been emitted.
  const std::size_t n = components.size();
  std::vector<std::set<int>> dependents(n);
  std::vector<int> pending(n, 0);
  for (const auto& [from, targets] : graph.edges) {
    if (!component.contains(from)) continue;
    for (const auto& to : targets) {
      if (!component.contains(to)) continue;
      const int a = component[from];
      const int b = component[to];
      if (a != b && dependents[static_cast<std::size_t>(b)].insert(a).second) ++pending[static_cast<std::size_t>(a)];
    }
  }
  using Entry = std::pair<std::string, int>;  // (smallest member, component)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (std::size_t c = 0; c < n; ++c) {
    if (pending[c] == 0) ready.emplace(components[c].front(), static_cast<int>(c));
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const auto c = static_cast<std::size_t>(ready.top().second);
    ready.pop();
    order.insert(order.end(), components[c].begin(), components[c].end());
    for (int d : dependents[c]) {
      if (--pending[static_cast<std::size_t>(d)] == 0) {
        ready.emplace(components[static_cast<std::size_t>(d)].front(), d);
      }
    }
  }
  return order;
}

}  // namespace coedit::python
