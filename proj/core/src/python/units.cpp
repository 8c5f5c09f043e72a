#include "coedit/python/units.hpp"

#include <algorithm>
#include <map>

#include "coedit/error.hpp"
#include "coedit/line_diff.hpp"

namespace coedit::python {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Function:
      return "function";
    case UnitKind::ClassRegion:
      return "class-region";
    case UnitKind::ModuleRegion:
      return "module-region";
  }
  return "function";
}

UnitKind unit_kind_from_string(std::string_view text) {
  if (text == "function") return UnitKind::Function;
  if (text == "class-region") return UnitKind::ClassRegion;
  if (text == "module-region") return UnitKind::ModuleRegion;
  throw DataError("unknown unit kind '" + std::string(text) + "'");
}

std::string module_path_for(std::string_view file_path) {
  std::string path(file_path);
  if (path.ends_with(".py")) path.resize(path.size() - 3);
  if (path.ends_with("/__init__")) path.resize(path.size() - 9);
  if (path == "__init__") path.clear();
  std::replace(path.begin(), path.end(), '/', '.');
  return path;
}

namespace {

struct Item {
  int first = 0;
  int last = 0;
  bool is_unit = false;
  CodeUnit unit;  // when is_unit
};

class Partitioner {
 public:
  Partitioner(const Module& module, std::string module_path) : module_(module), module_path_(std::move(module_path)) {}

  UnitPartition run() {
    scope(module_.body, "", "");
    std::sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) { return a.first < b.first; });
    attach_gap_lines();

    UnitPartition out;
    for (auto& item : items_) {
      if (!item.is_unit) {
        out.class_headers.emplace_back(item.first, item.last);
        continue;
      }
      item.unit.first_line = item.first;
      item.unit.last_line = item.last;
      for (int l = item.first; l <= item.last; ++l) item.unit.lines.push_back(rstrip(module_.line(l)));
      out.units.push_back(std::move(item.unit));
    }
    return out;
  }

 private:
  void scope(const std::vector<Statement>& body, const std::string& prefix, const std::string& cls) {
    std::vector<const Statement*> run;
    std::string previous_def;
    int decorator_first = 0;

    auto flush_run = [&] {
      if (run.empty()) return;
      const std::string label = previous_def.empty() ? "<head>" : "<after " + previous_def + ">";
      add_unit(prefix + label, cls.empty() ? UnitKind::ModuleRegion : UnitKind::ClassRegion, run.front()->first_line,
               run.back()->last_line, cls);
      run.clear();
    };

    for (const auto& s : body) {
      if (s.is_decorator()) {
        if (decorator_first == 0) decorator_first = s.first_line;
        continue;
      }
      const int first = decorator_first != 0 ? decorator_first : s.first_line;
      if (s.is_def()) {
        flush_run();
        const std::string name = s.defined_name();
        add_unit(prefix + name, UnitKind::Function, first, s.last_line, cls);
        previous_def = name;
      } else if (s.is_class()) {
        flush_run();
        const std::string name = s.defined_name();
        const std::string qualified = prefix + name;
        if (s.inline_body) {
          add_unit(qualified + ".<head>", UnitKind::ClassRegion, first, s.last_line, qualified);
        } else {
          Item header;
          header.first = first;
          header.last = s.header_last_line;
          items_.push_back(std::move(header));
          scope(s.body, qualified + ".", qualified);
        }
        previous_def = name;
      } else {
        run.push_back(&s);
      }
      decorator_first = 0;
    }
    flush_run();
  }

  void add_unit(const std::string& name, UnitKind kind, int first, int last, const std::string& cls) {
    Item item;
    item.first = first;
    item.last = last;
    item.is_unit = true;
    std::string unique = name;
    if (const int seen = seen_[name]++; seen > 0) unique += "#" + std::to_string(seen + 1);
    item.unit.id = UnitId{module_path_, unique, kind};
    item.unit.enclosing_class = cls;
    items_.push_back(std::move(item));
  }

  bool blank(int line) const { return module_.line(line).find_first_not_of(" \t\f\r") == std::string::npos; }

  // Comment-only lines in the gaps between items join the next item, or the
  // last item at the end of the file.
  void attach_gap_lines() {
    int previous_end = 0;
    for (auto& item : items_) {
      int start = previous_end + 1;
      while (start < item.first && blank(start)) ++start;
      item.first = std::min(item.first, start);
      previous_end = std::max(previous_end, item.last);
    }
    if (!items_.empty()) {
      int end = static_cast<int>(module_.lines.size());
      while (end > previous_end && blank(end)) --end;
      auto last_unit = std::find_if(items_.rbegin(), items_.rend(), [](const Item& i) { return i.is_unit; });
      if (last_unit != items_.rend() && end > previous_end) last_unit->last = end;
    }
  }

  const Module& module_;
  std::string module_path_;
  std::vector<Item> items_;
  std::map<std::string, int> seen_;
};

}  // namespace

UnitPartition partition_module(const Module& module, const std::string& module_path) {
  return Partitioner(module, module_path).run();
}

std::vector<CodeUnit> extract_units(std::string_view source, const std::string& module_path) {
  return partition_module(parse_module(source), module_path).units;
}

}  // namespace coedit::python
