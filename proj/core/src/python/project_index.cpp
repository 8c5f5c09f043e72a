#include "coedit/python/project_index.hpp"

#include <algorithm>
#include <functional>

#include "coedit/error.hpp"
#include "coedit/line_diff.hpp"

namespace coedit::python {

std::string_view to_string(UsageSite::Kind kind) {
  switch (kind) {
    case UsageSite::Kind::Function:
      return "function";
    case UsageSite::Kind::Variable:
      return "variable";
    case UsageSite::Kind::ClassMember:
      return "class-member";
  }
  return "function";
}

UsageSite::Kind usage_kind_from_string(std::string_view text) {
  if (text == "function") return UsageSite::Kind::Function;
  if (text == "variable") return UsageSite::Kind::Variable;
  if (text == "class-member") return UsageSite::Kind::ClassMember;
  throw DataError("unknown usage kind '" + std::string(text) + "'");
}

namespace {

bool is_open(const PyToken& t) { return t.kind == TokenKind::Op && (t.text == "(" || t.text == "[" || t.text == "{"); }
bool is_close(const PyToken& t) { return t.kind == TokenKind::Op && (t.text == ")" || t.text == "]" || t.text == "}"); }

bool is_assign_op(const PyToken& t) {
  if (t.kind != TokenKind::Op) return false;
  static const std::set<std::string, std::less<>> ops = {"=",  "+=", "-=", "*=",  "/=",  "//=", "%=",
                                                         "**=", "&=", "|=", "^=", ">>=", "<<=", "@="};
  return ops.contains(t.text);
}

std::string strip_indent(const std::string& line, std::size_t width) {
  std::size_t k = 0;
  while (k < width && k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
  return line.substr(k);
}

/// Header of a compound statement up to its colon, followed by " ...".
std::string header_text(const Module& module, const Statement& s) {
  const PyToken& first = s.tokens.front();
  const PyToken& colon = s.tokens[s.colon];
  std::string out;
  for (int l = first.line; l <= colon.end_line; ++l) {
    std::string line = module.line(l);
    if (l == colon.end_line) line.resize(std::min(line.size(), static_cast<std::size_t>(colon.end_col)));
    if (l == first.line) {
      line = line.substr(std::min(line.size(), static_cast<std::size_t>(first.col)));
    } else {
      out.push_back('\n');
      line = strip_indent(line, static_cast<std::size_t>(first.col));
    }
    out += line;
  }
  return out + " ...";
}

/// Source text of a simple statement; statements sharing a line via ';' are
/// cut to their own tokens.
std::string simple_text(const Module& module, const Statement& s) {
  const PyToken& first = s.tokens.front();
  const PyToken& last = s.tokens.back();
  std::string out;
  for (int l = first.line; l <= last.end_line; ++l) {
    std::string line = module.line(l);
    if (l == last.end_line) line.resize(std::min(line.size(), static_cast<std::size_t>(last.end_col)));
    if (l == first.line) {
      line = line.substr(std::min(line.size(), static_cast<std::size_t>(first.col)));
    } else {
      out.push_back('\n');
      line = strip_indent(line, static_cast<std::size_t>(first.col));
    }
    out += line;
  }
  return out;
}

using Tokens = std::vector<PyToken>;

/// Splits a token range at top-level occurrences of `pred`.
std::vector<Tokens> split_top(const Tokens& tokens, const std::function<bool(const PyToken&)>& pred) {
  std::vector<Tokens> parts(1);
  int depth = 0;
  for (const auto& t : tokens) {
    if (is_open(t)) ++depth;
    if (is_close(t)) --depth;
    if (depth == 0 && pred(t)) {
      parts.emplace_back();
      continue;
    }
    parts.back().push_back(t);
  }
  return parts;
}

/// Target expressions of an assignment statement (plain, augmented or annotated).
std::vector<Tokens> assignment_targets(const Tokens& tokens) {
  auto parts = split_top(tokens, is_assign_op);
  std::vector<Tokens> targets;
  if (parts.size() > 1) {
    parts.pop_back();
    targets = std::move(parts);
  } else {
    auto annotated = split_top(tokens, [](const PyToken& t) { return t.is_op(":"); });
    if (annotated.size() == 2) targets.push_back(annotated.front());
  }
  // Tuple targets.
  std::vector<Tokens> out;
  for (auto& target : targets) {
    Tokens inner = target;
    while (inner.size() >= 2 && is_open(inner.front()) && inner.front().text != "{" && is_close(inner.back())) {
      inner = Tokens(inner.begin() + 1, inner.end() - 1);
    }
    for (auto& element : split_top(inner, [](const PyToken& t) { return t.is_op(","); })) {
      if (!element.empty() && (element.front().is_op("*"))) element.erase(element.begin());
      if (!element.empty()) out.push_back(std::move(element));
    }
  }
  return out;
}

/// Dotted-name parts of a target/expression made only of NAME ('.' NAME)*.
std::optional<std::vector<std::string>> dotted(const Tokens& tokens) {
  if (tokens.empty() || tokens.size() % 2 == 0) return std::nullopt;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i % 2 == 0) {
      if (tokens[i].kind != TokenKind::Name || is_keyword(tokens[i].text)) return std::nullopt;
      parts.push_back(tokens[i].text);
    } else if (!tokens[i].is_op(".")) {
      return std::nullopt;
    }
  }
  return parts;
}

std::string parent_module(const std::string& module) {
  const auto dot = module.rfind('.');
  return dot == std::string::npos ? std::string{} : module.substr(0, dot);
}

std::string join_dotted(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + "." + b;
}

}  // namespace

std::vector<ImportBinding> import_bindings(const Statement& s, const std::string& current_module, bool is_package) {
  std::vector<ImportBinding> out;
  if (s.is_compound() || s.tokens.empty()) return out;
  const Tokens& t = s.tokens;

  auto read_dotted = [&](std::size_t& i) {
    std::string name;
    while (i < t.size() && (t[i].kind == TokenKind::Name || t[i].is_op(".")) && !t[i].is_name("import") &&
           !t[i].is_name("as")) {
      name += t[i].text;
      ++i;
    }
    return name;
  };

  if (t.front().is_name("import")) {
    std::size_t i = 1;
    while (i < t.size()) {
      ImportBinding b;
      b.module = read_dotted(i);
      if (i + 1 < t.size() && t[i].is_name("as")) {
        b.local = t[i + 1].text;
        i += 2;
      } else {
        b.local = b.module.substr(0, b.module.find('.'));
        b.dotted_root = b.module.find('.') != std::string::npos;
      }
      if (!b.module.empty()) out.push_back(std::move(b));
      while (i < t.size() && !t[i].is_op(",")) ++i;
      ++i;
    }
    return out;
  }

  if (!t.front().is_name("from")) return out;
  std::size_t i = 1;
  int level = 0;
  while (i < t.size() && (t[i].is_op(".") || t[i].is_op("..."))) {
    level += static_cast<int>(t[i].text.size());
    ++i;
  }
  std::string module = read_dotted(i);
  if (level > 0) {
    std::string base = is_package ? current_module : parent_module(current_module);
    for (int up = 1; up < level; ++up) base = parent_module(base);
    module = join_dotted(base, module);
  }
  if (i >= t.size() || !t[i].is_name("import")) return out;
  ++i;
  while (i < t.size()) {
    if (t[i].is_op("(") || t[i].is_op(")") || t[i].is_op(",")) {
      ++i;
      continue;
    }
    ImportBinding b;
    b.module = module;
    if (t[i].is_op("*")) {
      b.star = true;
      ++i;
    } else {
      b.symbol = t[i].text;
      b.local = b.symbol;
      ++i;
      if (i + 1 < t.size() && t[i].is_name("as")) {
        b.local = t[i + 1].text;
        i += 2;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string SignatureDoc::render() const {
  std::string out;
  std::string current_module;
  std::string current_class;
  for (const auto& e : entries) {
    if (out.empty() || e.module != current_module) {
      if (!out.empty()) out += "\n";
      out += "# module: " + e.module + "\n";
      current_module = e.module;
      current_class.clear();
    }
    if (e.kind == UsageSite::Kind::ClassMember) {
      const std::string cls = e.symbol.substr(0, e.symbol.rfind('.'));
      if (cls != current_class) {
        out += "class " + cls + ":\n";
        current_class = cls;
      }
      for (const auto& line : split_lines(e.definition_text)) out += "    " + line + "\n";
    } else {
      current_class.clear();
      out += e.definition_text + "\n";
    }
  }
  return out;
}

ProjectIndex ProjectIndex::build(const std::map<std::string, std::string>& files) {
  ProjectIndex index;
  for (const auto& [path, text] : files) {
    if (!path.ends_with(".py")) continue;
    if (!index.add_module(module_path_for(path), text, path.ends_with("__init__.py"))) index.skipped_.push_back(path);
  }
  return index;
}

bool ProjectIndex::add_module(const std::string& module_path, std::string_view source, bool is_package) {
  Module module;
  try {
    module = parse_module(source);
  } catch (const ParseError&) {
    modules_.erase(module_path);
    return false;
  }
  ModuleInfo info;
  info.is_package = is_package;

  auto define = [](std::map<std::string, std::pair<int, UsageSite>>& table, const std::string& name, int line,
                   UsageSite site) {
    auto it = table.find(name);
    if (it == table.end() || line < it->second.first) table[name] = {line, std::move(site)};
  };

  // Assignments to self.<attr> / cls.<attr> anywhere inside a method.
  std::function<void(const std::vector<Statement>&, ClassInfo&, const std::string&)> scan_method;
  scan_method = [&](const std::vector<Statement>& body, ClassInfo& cls, const std::string& cls_name) {
    for (const auto& s : body) {
      if (s.is_def() || s.is_class()) continue;
      if (s.is_compound()) {
        scan_method(s.body, cls, cls_name);
        continue;
      }
      for (const auto& target : assignment_targets(s.tokens)) {
        auto parts = dotted(target);
        if (parts && parts->size() == 2 && ((*parts)[0] == "self" || (*parts)[0] == "cls")) {
          define(cls.members, (*parts)[1], s.first_line,
                 {module_path, cls_name + "." + (*parts)[1], UsageSite::Kind::ClassMember, simple_text(module, s)});
        }
      }
    }
  };

  std::function<void(const std::vector<Statement>&, const std::string&)> scan_class;
  std::function<void(const std::vector<Statement>&)> scan_module;

  scan_class = [&](const std::vector<Statement>& body, const std::string& cls_name) {
    ClassInfo& cls = info.classes[cls_name];
    for (const auto& s : body) {
      if (s.is_def()) {
        const std::string name = s.defined_name();
        define(cls.members, name, s.first_line,
               {module_path, cls_name + "." + name, UsageSite::Kind::Function, header_text(module, s)});
        scan_method(s.body, cls, cls_name);
      } else if (s.is_class()) {
        const std::string name = s.defined_name();
        define(cls.members, name, s.first_line,
               {module_path, cls_name + "." + name, UsageSite::Kind::Function, header_text(module, s)});
      } else if (s.is_compound()) {
        scan_class(s.body, cls_name);
      } else {
        for (const auto& target : assignment_targets(s.tokens)) {
          auto parts = dotted(target);
          if (parts && parts->size() == 1) {
            define(cls.members, parts->front(), s.first_line,
                   {module_path, cls_name + "." + parts->front(), UsageSite::Kind::ClassMember, simple_text(module, s)});
          }
        }
      }
    }
  };

  scan_module = [&](const std::vector<Statement>& body) {
    for (const auto& s : body) {
      if (s.is_def()) {
        const std::string name = s.defined_name();
        define(info.globals, name, s.first_line, {module_path, name, UsageSite::Kind::Function, header_text(module, s)});
      } else if (s.is_class()) {
        const std::string name = s.defined_name();
        define(info.globals, name, s.first_line, {module_path, name, UsageSite::Kind::Function, header_text(module, s)});
        ClassInfo& cls = info.classes[name];
        cls.header = header_text(module, s);
        // Base class names: top-level NAME chains inside the header parens.
        auto open = std::find_if(s.tokens.begin(), s.tokens.end(), [](const PyToken& t) { return t.is_op("("); });
        if (open != s.tokens.end()) {
          Tokens inside(open + 1, s.tokens.begin() + static_cast<std::ptrdiff_t>(s.colon));
          if (!inside.empty() && inside.back().is_op(")")) inside.pop_back();
          for (const auto& arg : split_top(inside, [](const PyToken& t) { return t.is_op(","); })) {
            if (auto parts = dotted(arg)) cls.bases.push_back(parts->back());
          }
        }
        scan_class(s.body, name);
      } else if (s.is_compound()) {
        if (s.keyword() == "for" || s.keyword() == "with") {
          Tokens header(s.tokens.begin() + 1, s.tokens.begin() + static_cast<std::ptrdiff_t>(s.colon));
          for (std::size_t i = 0; i < header.size(); ++i) {
            const bool bound = (s.keyword() == "for" && !header[i].is_name("in") && header[i].kind == TokenKind::Name &&
                                std::none_of(header.begin(), header.begin() + static_cast<std::ptrdiff_t>(i),
                                             [](const PyToken& t) { return t.is_name("in"); })) ||
                               (i > 0 && header[i - 1].is_name("as") && header[i].kind == TokenKind::Name);
            if (bound && !is_keyword(header[i].text)) {
              define(info.globals, header[i].text, s.first_line,
                     {module_path, header[i].text, UsageSite::Kind::Variable, header_text(module, s)});
            }
          }
        }
        scan_module(s.body);
      } else {
        for (auto& b : import_bindings(s, module_path, is_package)) info.imports.push_back(std::move(b));
        for (const auto& target : assignment_targets(s.tokens)) {
          auto parts = dotted(target);
          if (parts && parts->size() == 1) {
            define(info.globals, parts->front(), s.first_line,
                   {module_path, parts->front(), UsageSite::Kind::Variable, simple_text(module, s)});
          }
        }
      }
    }
  };

  scan_module(module.body);
  modules_[module_path] = std::move(info);
  return true;
}

std::optional<std::string> ProjectIndex::resolve_module(std::string_view name) const {
  if (name.empty()) return std::nullopt;
  const std::string key(name);
  if (modules_.contains(key)) return key;
  const std::string suffix = "." + key;
  for (const auto& [path, info] : modules_) {
    if (path.ends_with(suffix)) return path;
  }
  return std::nullopt;
}

std::optional<UsageSite> ProjectIndex::resolve_member(const std::string& module, const std::string& cls,
                                                      const std::string& member, int depth) const {
  if (depth > 6) return std::nullopt;
  auto mod = modules_.find(module);
  if (mod == modules_.end()) return std::nullopt;
  auto c = mod->second.classes.find(cls);
  if (c == mod->second.classes.end()) return std::nullopt;
  if (auto m = c->second.members.find(member); m != c->second.members.end()) return m->second.second;
  for (const auto& base : c->second.bases) {
    if (auto site = resolve_chain(module, {base, member}, depth + 1)) {
      if (site->kind == UsageSite::Kind::ClassMember || site->symbol.find('.') != std::string::npos) return site;
    }
  }
  return std::nullopt;
}

std::optional<UsageSite> ProjectIndex::resolve_chain(const std::string& module, const std::vector<std::string>& parts,
                                                     int depth) const {
  if (depth > 6 || parts.empty()) return std::nullopt;
  auto mod = modules_.find(module);
  if (mod == modules_.end()) return std::nullopt;
  const ModuleInfo& info = mod->second;
  const std::string& head = parts.front();

  if (auto g = info.globals.find(head); g != info.globals.end()) {
    if (parts.size() >= 2 && info.classes.contains(head)) {
      if (auto member = resolve_member(module, head, parts[1], depth + 1)) return member;
    }
    return g->second.second;
  }

  for (const auto& b : info.imports) {
    if (b.star || b.local != head) continue;
    if (!b.symbol.empty()) {
      // from m import s: s may be a module of its own or a name inside m.
      if (auto sub = resolve_module(join_dotted(b.module, b.symbol)); sub && parts.size() >= 2) {
        return resolve_chain(*sub, {parts.begin() + 1, parts.end()}, depth + 1);
      }
      if (auto target = resolve_module(b.module)) {
        std::vector<std::string> rest{b.symbol};
        rest.insert(rest.end(), parts.begin() + 1, parts.end());
        return resolve_chain(*target, rest, depth + 1);
      }
      return std::nullopt;
    }
    // import a.b.c / import a.b as x: find the longest module prefix.
    std::vector<std::string> names;
    std::string base = b.dotted_root ? b.local : b.module;
    std::size_t consumed = 1;
    std::optional<std::string> best = resolve_module(base);
    std::size_t best_consumed = 1;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      base += "." + parts[k];
      ++consumed;
      if (auto m = resolve_module(base)) {
        best = m;
        best_consumed = consumed;
      }
    }
    if (best && best_consumed < parts.size()) {
      return resolve_chain(*best, {parts.begin() + static_cast<std::ptrdiff_t>(best_consumed), parts.end()}, depth + 1);
    }
    return std::nullopt;
  }

  for (const auto& b : info.imports) {
    if (!b.star) continue;
    if (auto target = resolve_module(b.module); target && *target != module) {
      if (auto site = resolve_chain(*target, parts, depth + 1)) return site;
    }
  }
  return std::nullopt;
}

namespace {

/// Names bound inside the unit itself: parameters, assignment/loop/with
/// targets, local definitions and imports. `global` names are excluded.
std::set<std::string> local_names(const std::vector<PyToken>& tokens, const Module& fragment) {
  std::set<std::string> locals;
  std::set<std::string> globals;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if ((t.is_name("def") || t.is_name("class")) && i + 1 < tokens.size()) {
      locals.insert(tokens[i + 1].text);
      if (t.is_name("def") && i + 2 < tokens.size() && tokens[i + 2].is_op("(")) {
        int depth = 0;
        for (std::size_t k = i + 2; k < tokens.size(); ++k) {
          if (is_open(tokens[k])) ++depth;
          if (is_close(tokens[k]) && --depth == 0) break;
          const auto& prev = tokens[k - 1];
          if (depth == 1 && tokens[k].kind == TokenKind::Name &&
              (prev.is_op("(") || prev.is_op(",") || prev.is_op("*") || prev.is_op("**"))) {
            locals.insert(tokens[k].text);
          }
        }
      }
    }
    if (t.is_name("for")) {
      for (std::size_t k = i + 1; k < tokens.size() && !tokens[k].is_name("in"); ++k) {
        if (tokens[k].kind == TokenKind::Name) locals.insert(tokens[k].text);
      }
    }
    if (t.is_name("lambda")) {
      for (std::size_t k = i + 1; k < tokens.size() && !tokens[k].is_op(":"); ++k) {
        if (tokens[k].kind == TokenKind::Name) locals.insert(tokens[k].text);
      }
    }
    if (t.is_name("as") && i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Name) {
      locals.insert(tokens[i + 1].text);
    }
    if (t.is_op(":=") && i > 0 && tokens[i - 1].kind == TokenKind::Name) locals.insert(tokens[i - 1].text);
    if (t.is_name("global") || t.is_name("nonlocal")) {
      for (std::size_t k = i + 1; k < tokens.size() && tokens[k].line == t.line; ++k) {
        if (tokens[k].kind == TokenKind::Name) globals.insert(tokens[k].text);
      }
    }
  }

  std::function<void(const std::vector<Statement>&)> walk = [&](const std::vector<Statement>& body) {
    for (const auto& s : body) {
      if (s.is_compound()) {
        walk(s.body);
        continue;
      }
      for (const auto& b : import_bindings(s, "", false)) {
        if (!b.local.empty()) locals.insert(b.local);
      }
      for (const auto& target : assignment_targets(s.tokens)) {
        if (auto parts = dotted(target); parts && parts->size() == 1) locals.insert(parts->front());
      }
    }
  };
  walk(fragment.body);

  for (const auto& g : globals) locals.erase(g);
  return locals;
}

}  // namespace

std::vector<UsageSite> ProjectIndex::find_usages(const CodeUnit& unit) const {
  std::vector<UsageSite> out;
  if (!modules_.contains(unit.id.module)) return out;

  const std::string text = dedent(join_lines(unit.lines));
  LexOptions lenient;
  lenient.lenient = true;
  std::vector<PyToken> tokens;
  for (auto& t : tokenize(text, lenient)) {
    if (t.kind == TokenKind::Name || t.kind == TokenKind::Op || t.kind == TokenKind::String ||
        t.kind == TokenKind::Number) {
      tokens.push_back(std::move(t));
    }
  }
  const Module fragment = parse_fragment(text);
  const std::set<std::string> locals = local_names(tokens, fragment);

  // Track bracket kinds to recognise keyword-argument names.
  std::vector<char> brackets;
  auto add = [&](UsageSite site) {
    if (std::find(out.begin(), out.end(), site) == out.end()) out.push_back(std::move(site));
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (is_open(t)) brackets.push_back(t.text.front());
    if (is_close(t) && !brackets.empty()) brackets.pop_back();
    if (t.kind != TokenKind::Name || is_keyword(t.text)) continue;
    if (i > 0 && (tokens[i - 1].is_op(".") || tokens[i - 1].is_name("def") || tokens[i - 1].is_name("class"))) continue;
    if (!brackets.empty() && brackets.back() == '(' && i + 1 < tokens.size() && tokens[i + 1].is_op("=")) continue;

    std::vector<std::string> parts{t.text};
    for (std::size_t k = i + 1; k + 1 < tokens.size() && tokens[k].is_op(".") && tokens[k + 1].kind == TokenKind::Name;
         k += 2) {
      parts.push_back(tokens[k + 1].text);
    }

    if ((t.text == "self" || t.text == "cls") && !unit.enclosing_class.empty()) {
      if (parts.size() >= 2) {
        if (auto site = resolve_member(unit.id.module, unit.enclosing_class, parts[1], 0)) add(std::move(*site));
      }
      continue;
    }
    if (locals.contains(t.text)) continue;
    if (auto site = resolve_chain(unit.id.module, parts, 0)) add(std::move(*site));
  }
  return out;
}

SignatureDoc ProjectIndex::build_signature_doc(const CodeUnit& unit) const {
  const auto usages = find_usages(unit);
  SignatureDoc doc;
  std::vector<std::string> modules;
  for (const auto& u : usages) {
    if (std::find(modules.begin(), modules.end(), u.module) == modules.end()) modules.push_back(u.module);
  }
  std::sort(modules.begin(), modules.end());
  for (const auto& m : modules) {
    for (const auto& u : usages) {
      if (u.module != m) continue;
      const bool duplicate = std::any_of(doc.entries.begin(), doc.entries.end(), [&](const UsageSite& e) {
        return e.symbol == u.symbol && e.definition_text == u.definition_text;
      });
      if (!duplicate) doc.entries.push_back(u);
    }
  }
  return doc;
}

}  // namespace coedit::python
