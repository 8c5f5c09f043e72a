#include "coedit/miner.hpp"

#include <algorithm>
#include <istream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <set>

#include "coedit/error.hpp"
#include "coedit/git.hpp"

namespace coedit::miner {

using nlohmann::json;

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added:
      return "added";
    case ChangeKind::Deleted:
      return "deleted";
    case ChangeKind::Modified:
      return "modified";
  }
  return "modified";
}

ChangeKind change_kind_from_string(std::string_view text) {
  if (text == "added") return ChangeKind::Added;
  if (text == "deleted") return ChangeKind::Deleted;
  if (text == "modified") return ChangeKind::Modified;
  throw DataError("unknown change kind '" + std::string(text) + "'");
}

int UnitChange::start_line() const {
  if (after) return after->first_line;
  return before ? before->first_line : 0;
}

// ---- unit diff ------------------------------------------------------------------

CommitDiff diff_commit(const Snapshot& before, const Snapshot& after) {
  std::set<std::string> files;
  for (const auto& [path, text] : before) {
    auto it = after.find(path);
    if (path.ends_with(".py") && (it == after.end() || it->second != text)) files.insert(path);
  }
  for (const auto& [path, text] : after) {
    if (path.ends_with(".py") && !before.contains(path)) files.insert(path);
  }

  CommitDiff out;
  for (const auto& file : files) {
    const std::string module = python::module_path_for(file);
    std::vector<python::CodeUnit> old_units;
    std::vector<python::CodeUnit> new_units;
    try {
      if (auto it = before.find(file); it != before.end()) old_units = python::extract_units(it->second, module);
      if (auto it = after.find(file); it != after.end()) new_units = python::extract_units(it->second, module);
    } catch (const ParseError& e) {
      out.warnings.push_back(file + ": " + e.what());
      continue;
    }

    std::map<std::string, const python::CodeUnit*> old_by_name;
    for (const auto& u : old_units) old_by_name[u.id.name] = &u;
    std::set<std::string> matched;

    std::vector<UnitChange> file_changes;
    for (const auto& u : new_units) {
      auto it = old_by_name.find(u.id.name);
      if (it == old_by_name.end()) {
        UnitChange c{ChangeKind::Added, file, u.id, std::nullopt, u, {}};
        for (const auto& l : u.lines) c.diff.push_back({LineStatus::Add, l});
        file_changes.push_back(std::move(c));
        continue;
      }
      matched.insert(u.id.name);
      const python::CodeUnit& old = *it->second;
      if (old.lines == u.lines) continue;
      file_changes.push_back({ChangeKind::Modified, file, u.id, old, u, line_diff(old.lines, u.lines)});
    }
    for (const auto& u : old_units) {
      if (matched.contains(u.id.name)) continue;
      UnitChange c{ChangeKind::Deleted, file, u.id, u, std::nullopt, {}};
      for (const auto& l : u.lines) c.diff.push_back({LineStatus::Del, l});
      file_changes.push_back(std::move(c));
    }
    std::stable_sort(file_changes.begin(), file_changes.end(),
                     [](const UnitChange& a, const UnitChange& b) { return a.start_line() < b.start_line(); });
    std::move(file_changes.begin(), file_changes.end(), std::back_inserter(out.changes));
  }
  return out;
}

std::vector<UnitChange> order_changes(std::vector<UnitChange> changes, const python::ImportGraph& graph) {
  std::map<std::string, std::size_t> rank;
  for (const auto& module : python::import_order(graph)) rank.emplace(module, rank.size());
  // Modules outside the graph follow, by path.
  std::set<std::string> extra;
  for (const auto& c : changes) {
    if (!rank.contains(c.id.module)) extra.insert(c.id.module);
  }
  for (const auto& m : extra) rank.emplace(m, rank.size());

  auto key = [&](const UnitChange& c) {
    return std::make_tuple(rank.at(c.id.module), c.file, c.start_line(), c.kind != ChangeKind::Deleted, c.id.name);
  };
  std::stable_sort(changes.begin(), changes.end(), [&](const UnitChange& a, const UnitChange& b) { return key(a) < key(b); });
  return changes;
}

// ---- instances ------------------------------------------------------------------

std::vector<ProblemInstance> make_instances(const std::vector<UnitChange>& ordered,
                                            const python::ProjectIndex& parent_index, const Provenance& provenance) {
  std::vector<ProblemInstance> out;
  std::vector<PriorChange> prior;
  for (const auto& change : ordered) {
    if (change.kind == ChangeKind::Modified) {
      ProblemInstance inst;
      inst.project = provenance.project;
      inst.commit = provenance.commit;
      inst.parent = provenance.parent;
      inst.file = change.file;
      inst.unit = change.before->id;

      LineDiff diff = change.diff;
      for (const auto& l : change.before->lines) inst.query.push_back({LineStatus::Empty, l});
      if (!diff.empty() && diff.back().status == LineStatus::Add) {
        inst.query.push_back({LineStatus::Empty, ""});
        diff.push_back({LineStatus::Empty, ""});
      }
      inst.region = EditRegion::whole(static_cast<int>(inst.query.size()));
      inst.ground_truth = edit_from_diff(diff);
      inst.prior_changes = prior;
      inst.signature_doc = parent_index.build_signature_doc(*change.before);
      out.push_back(std::move(inst));
    }
    prior.push_back({change.file, change.id.name, change.kind, change.diff});
  }
  return out;
}

std::vector<std::vector<std::size_t>> change_groups(const EditPlan& plan) {
  std::vector<std::vector<std::size_t>> groups;
  const auto& entries = plan.entries();
  std::size_t change_no = 0;
  std::vector<std::size_t> dels;
  std::vector<std::size_t> adds;
  auto flush = [&] {
    const std::size_t pairs = std::min(dels.size(), adds.size());
    // Emit in top-to-bottom order of each group's first change.
    std::vector<std::vector<std::size_t>> hunk;
    for (std::size_t k = 0; k < pairs; ++k) hunk.push_back({dels[k], adds[k]});
    for (std::size_t k = pairs; k < dels.size(); ++k) hunk.push_back({dels[k]});
    for (std::size_t k = pairs; k < adds.size(); ++k) hunk.push_back({adds[k]});
    for (auto& g : hunk) std::sort(g.begin(), g.end());
    std::sort(hunk.begin(), hunk.end());
    std::move(hunk.begin(), hunk.end(), std::back_inserter(groups));
    dels.clear();
    adds.clear();
  };
  for (const auto& e : entries) {
    if (!e.is_change) {
      flush();
      continue;
    }
    (e.base_line == 0 ? adds : dels).push_back(change_no++);
  }
  flush();
  return groups;
}

ProblemInstance synthesize_multiround(const ProblemInstance& instance, std::mt19937_64& rng) {
  const EditPlan plan(instance.query, instance.region, instance.ground_truth);
  if (plan.change_count() < 2) throw NotEligible("fewer than two changed lines");
  const auto groups = change_groups(plan);
  if (groups.size() < 2) throw NotEligible("fewer than two independent changes");

  std::vector<bool> target(groups.size());
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    for (std::size_t g = 0; g < groups.size(); ++g) target[g] = coin(rng);
    const auto chosen = static_cast<std::size_t>(std::count(target.begin(), target.end(), true));
    if (chosen > 0 && chosen < groups.size()) break;
  }
  std::vector<bool> inlined(plan.change_count(), true);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!target[g]) continue;
    for (auto c : groups[g]) inlined[c] = false;
  }
  auto split = plan.split(inlined);
  ProblemInstance out = instance;
  out.query = std::move(split.query);
  out.region = split.region;
  out.ground_truth = std::move(split.target);
  return out;
}

std::vector<CompletionProblem> make_completion_instances(const std::vector<ProblemInstance>& instances) {
  std::vector<CompletionProblem> out;
  for (const auto& inst : instances) {
    const EditPlan plan(inst.query, inst.region, inst.ground_truth);
    if (plan.change_count() == 0) continue;
    const auto& last = plan.entries()[plan.change_indices().back()];
    if (last.base_line != 0) continue;  // the final change deletes a line

    CompletionProblem problem;
    problem.kind = CompletionKind::Added;
    const auto groups = change_groups(plan);
    const std::size_t last_change = plan.change_count() - 1;
    for (const auto& g : groups) {
      if (std::find(g.begin(), g.end(), last_change) != g.end() && g.size() > 1) problem.kind = CompletionKind::Modified;
    }

    std::vector<bool> inlined(plan.change_count(), true);
    inlined.back() = false;
    auto split = plan.split(inlined);
    problem.instance = inst;
    problem.instance.query = split.query;
    problem.instance.region = split.region;
    problem.instance.ground_truth = split.target;
    problem.target_line = last.line.text;

    const int placeholder = split.target.entries().begin()->first;
    const auto anchor = static_cast<std::size_t>(split.region.a + placeholder - 2);
    for (std::size_t i = 0; i < split.query.size(); ++i) {
      if (split.query[i].status == LineStatus::Del) continue;
      (i < anchor ? problem.plain_prefix : problem.plain_suffix).push_back(split.query[i].text);
    }
    while (!problem.plain_suffix.empty() && problem.plain_suffix.back().empty()) problem.plain_suffix.pop_back();
    out.push_back(std::move(problem));
  }
  return out;
}

// ---- repository walk ------------------------------------------------------------

MiningCounts& MiningCounts::operator+=(const MiningCounts& o) {
  projects += o.projects;
  commits += o.commits;
  used_commits += o.used_commits;
  modified_files += o.modified_files;
  modified_units += o.modified_units;
  modified_functions += o.modified_functions;
  added_units += o.added_units;
  deleted_units += o.deleted_units;
  changed_lines += o.changed_lines;
  skipped_files += o.skipped_files;
  return *this;
}

namespace {

/// Mutable view of the Python files at one commit, with its project index
/// and import bindings kept in step.
class SnapshotState {
 public:
  explicit SnapshotState(GitRepository& repo) : repo_(repo) {}

  const std::string& commit() const { return commit_; }
  const Snapshot& files() const { return files_; }
  const python::ProjectIndex& index() const { return index_; }

  void load(const std::string& commit) {
    files_.clear();
    index_ = {};
    imports_.clear();
    std::vector<std::string> paths;
    for (auto& p : repo_.list_files(commit)) {
      if (p.ends_with(".py")) paths.push_back(std::move(p));
    }
    for (auto& [path, text] : repo_.read_files(commit, paths)) set(path, std::move(text));
    commit_ = commit;
  }

  /// Moves to `commit`; returns the changed Python paths.
  std::vector<std::string> advance(const std::string& commit) {
    std::vector<std::string> removed;
    std::vector<std::string> updated;
    for (const auto& change : repo_.changed_files(commit_, commit)) {
      if (!change.path.ends_with(".py")) continue;
      (change.status == 'D' ? removed : updated).push_back(change.path);
    }
    for (const auto& path : removed) erase(path);
    auto contents = repo_.read_files(commit, updated);
    for (const auto& path : updated) {
      if (auto it = contents.find(path); it != contents.end()) {
        set(path, std::move(it->second));
      } else {
        erase(path);
      }
    }
    commit_ = commit;
    removed.insert(removed.end(), updated.begin(), updated.end());
    return removed;
  }

  python::ImportGraph graph() const { return python::build_import_graph(imports_); }

 private:
  void set(const std::string& path, std::string text) {
    const std::string module = python::module_path_for(path);
    const bool package = path.ends_with("__init__.py");
    index_.add_module(module, text, package);
    try {
      imports_[module] = python::module_imports(python::parse_module(text), module, package);
    } catch (const ParseError&) {
      imports_[module].clear();
    }
    files_[path] = std::move(text);
  }

  void erase(const std::string& path) {
    const std::string module = python::module_path_for(path);
    files_.erase(path);
    index_.remove_module(module);
    imports_.erase(module);
  }

  GitRepository& repo_;
  std::string commit_;
  Snapshot files_;
  python::ProjectIndex index_;
  std::map<std::string, std::vector<python::ImportBinding>> imports_;
};

Snapshot subset(const Snapshot& files, const std::vector<std::string>& paths) {
  Snapshot out;
  for (const auto& p : paths) {
    if (auto it = files.find(p); it != files.end()) out.emplace(p, it->second);
  }
  return out;
}

}  // namespace

MiningResult mine_repository(const std::filesystem::path& path, const std::string& project, const MineOptions& options) {
  GitRepository repo(path);
  MiningResult result;
  result.counts.projects = 1;
  SnapshotState state(repo);

  for (const auto& commit : repo.first_parent_history(options.max_commits)) {
    if (commit.parents.empty()) {
      state.load(commit.id);
      continue;
    }
    const std::string& parent = commit.parents.front();
    if (state.commit().empty()) {
      state.load(parent);
    } else if (state.commit() != parent) {
      state.advance(parent);
    }
    if (commit.parents.size() > 1) {
      state.advance(commit.id);
      continue;
    }

    ++result.counts.commits;
    const Snapshot before_files = state.files();
    const python::ProjectIndex before_index = state.index();
    const auto changed = state.advance(commit.id);
    CommitDiff diff = diff_commit(subset(before_files, changed), subset(state.files(), changed));
    result.counts.skipped_files += diff.warnings.size();
    for (auto& w : diff.warnings) result.warnings.push_back(project + "@" + commit.id.substr(0, 12) + ": " + w);

    std::set<std::string> modified_files;
    for (const auto& c : diff.changes) {
      switch (c.kind) {
        case ChangeKind::Added:
          ++result.counts.added_units;
          break;
        case ChangeKind::Deleted:
          ++result.counts.deleted_units;
          break;
        case ChangeKind::Modified:
          ++result.counts.modified_units;
          if (c.id.kind == python::UnitKind::Function) ++result.counts.modified_functions;
          result.counts.changed_lines += changed_line_count(c.diff);
          modified_files.insert(c.file);
          break;
      }
    }
    result.counts.modified_files += modified_files.size();
    if (modified_files.empty()) continue;

    const auto ordered = order_changes(std::move(diff.changes), state.graph());
    auto instances = make_instances(ordered, before_index, {project, commit.id, parent});
    if (!instances.empty()) ++result.counts.used_commits;
    std::move(instances.begin(), instances.end(), std::back_inserter(result.instances));
  }
  return result;
}

// ---- serialization ------------------------------------------------------------

namespace {

json instance_object(const ProblemInstance& inst) {
  const auto statuses = statuses_of(inst.query);
  json prior = json::array();
  for (const auto& p : inst.prior_changes) {
    prior.push_back({{"file", p.file}, {"unit", p.unit}, {"kind", to_string(p.kind)}, {"diff", enc_context(p.diff).render()}});
  }
  json signatures = json::array();
  for (const auto& e : inst.signature_doc.entries) {
    signatures.push_back(
        {{"module", e.module}, {"symbol", e.symbol}, {"kind", python::to_string(e.kind)}, {"text", e.definition_text}});
  }
  return {{"schema", kInstanceSchema},
          {"project", inst.project},
          {"commit", inst.commit},
          {"parent", inst.parent},
          {"file", inst.file},
          {"module", inst.unit.module},
          {"unit", inst.unit.name},
          {"unit_kind", python::to_string(inst.unit.kind)},
          {"query", enc_input(inst.query, inst.region).render()},
          {"region", {{"a", inst.region.a}, {"n", inst.region.n}}},
          {"ground_truth", enc_output(inst.ground_truth, inst.region, statuses).render()},
          {"prior_changes", std::move(prior)},
          {"signature_doc", std::move(signatures)}};
}

ProblemInstance instance_from_object(const json& j) {
  if (j.value("schema", "") != kInstanceSchema) throw DataError("unsupported schema '" + j.value("schema", "") + "'");
  ProblemInstance inst;
  inst.project = j.at("project").get<std::string>();
  inst.commit = j.at("commit").get<std::string>();
  inst.parent = j.value("parent", "");
  inst.file = j.at("file").get<std::string>();
  inst.unit.module = j.value("module", python::module_path_for(inst.file));
  inst.unit.name = j.at("unit").get<std::string>();
  inst.unit.kind = python::unit_kind_from_string(j.at("unit_kind").get<std::string>());

  auto decoded = parse_input(TokenStream::parse(j.at("query").get<std::string>()));
  inst.query = std::move(decoded.lines);
  inst.region = EditRegion{j.at("region").at("a").get<int>(), j.at("region").at("n").get<int>()};
  validate_region(inst.region, inst.query.size());
  if (decoded.region && !(*decoded.region == inst.region)) throw DataError("query placeholders disagree with region");
  inst.ground_truth =
      parse_output(TokenStream::parse(j.at("ground_truth").get<std::string>()), statuses_of(inst.query), inst.region);

  for (const auto& p : j.at("prior_changes")) {
    inst.prior_changes.push_back({p.at("file").get<std::string>(), p.at("unit").get<std::string>(),
                                  change_kind_from_string(p.at("kind").get<std::string>()),
                                  parse_input(TokenStream::parse(p.at("diff").get<std::string>())).lines});
  }
  for (const auto& s : j.at("signature_doc")) {
    inst.signature_doc.entries.push_back({s.at("module").get<std::string>(), s.at("symbol").get<std::string>(),
                                          python::usage_kind_from_string(s.at("kind").get<std::string>()),
                                          s.at("text").get<std::string>()});
  }
  return inst;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance) { return instance_object(instance).dump(); }

ProblemInstance instance_from_json(const std::string& line) {
  try {
    return instance_from_object(json::parse(line));
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid instance record: ") + e.what());
  } catch (const MalformedOutput& e) {
    throw DataError(std::string("invalid token stream in instance record: ") + e.what());
  }
}

std::string completion_to_json(const CompletionProblem& problem) {
  json j = instance_object(problem.instance);
  j["task"] = "completion";
  j["completion_kind"] = problem.kind == CompletionKind::Added ? "added" : "modified";
  j["target_line"] = problem.target_line;
  j["plain_prefix"] = problem.plain_prefix;
  j["plain_suffix"] = problem.plain_suffix;
  return j.dump();
}

void write_instances(std::ostream& out, const std::vector<ProblemInstance>& instances) {
  for (const auto& inst : instances) out << instance_to_json(inst) << '\n';
}

std::vector<ProblemInstance> read_instances(std::istream& in) {
  std::vector<ProblemInstance> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(line));
    } catch (const Error& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string counts_to_json(const MiningCounts& c) {
  return json{{"schema", "coedit-summary/1"},
              {"projects", c.projects},
              {"commits", c.commits},
              {"used_commits", c.used_commits},
              {"modified_files", c.modified_files},
              {"modified_units", c.modified_units},
              {"modified_functions", c.modified_functions},
              {"added_units", c.added_units},
              {"deleted_units", c.deleted_units},
              {"changed_lines", c.changed_lines},
              {"skipped_files", c.skipped_files}}
      .dump(2);
}

MiningCounts counts_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    MiningCounts c;
    c.projects = j.at("projects").get<std::size_t>();
    c.commits = j.at("commits").get<std::size_t>();
    c.used_commits = j.at("used_commits").get<std::size_t>();
    c.modified_files = j.at("modified_files").get<std::size_t>();
    c.modified_units = j.at("modified_units").get<std::size_t>();
    c.modified_functions = j.at("modified_functions").get<std::size_t>();
    c.added_units = j.at("added_units").get<std::size_t>();
    c.deleted_units = j.at("deleted_units").get<std::size_t>();
    c.changed_lines = j.at("changed_lines").get<std::size_t>();
    c.skipped_files = j.value("skipped_files", std::size_t{0});
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid mining summary: ") + e.what());
  }
}

// ---- statistics -----------------------------------------------------------------

TokenDistribution distribution(std::vector<std::size_t> values, std::size_t cap) {
  TokenDistribution d;
  d.cap = cap;
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  d.median = n % 2 == 1 ? static_cast<double>(values[n / 2])
                        : (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
  d.mean = static_cast<double>(std::accumulate(values.begin(), values.end(), std::size_t{0})) / static_cast<double>(n);
  d.max = values.back();
  const auto at_cap = std::count_if(values.begin(), values.end(), [cap](std::size_t v) { return v >= cap; });
  d.fraction_at_cap = static_cast<double>(at_cap) / static_cast<double>(n);
  return d;
}

DatasetStats dataset_stats(const std::vector<ProblemInstance>& instances, const Tokenizer& tokenizer,
                           const std::optional<MiningCounts>& mining, const StatsCaps& caps) {
  DatasetStats stats;
  stats.instances = instances.size();
  std::vector<std::size_t> query, output, prev, signature;
  std::set<std::string> projects;
  std::set<std::pair<std::string, std::string>> commits;
  std::set<std::tuple<std::string, std::string, std::string>> files;
  MiningCounts derived;
  for (const auto& inst : instances) {
    query.push_back(tokenizer.count(enc_input(inst.query, inst.region).render()));
    output.push_back(tokenizer.count(enc_output(inst.ground_truth, inst.region, statuses_of(inst.query)).render()));
    std::size_t prev_tokens = 0;
    for (const auto& p : inst.prior_changes) prev_tokens += tokenizer.count(enc_context(p.diff).render());
    prev.push_back(prev_tokens);
    signature.push_back(tokenizer.count(inst.signature_doc.render()));

    projects.insert(inst.project);
    commits.emplace(inst.project, inst.commit);
    files.emplace(inst.project, inst.commit, inst.file);
    ++derived.modified_units;
    if (inst.unit.kind == python::UnitKind::Function) ++derived.modified_functions;
    derived.changed_lines += inst.ground_truth.line_change_count();
  }
  derived.projects = projects.size();
  derived.commits = commits.size();
  derived.used_commits = commits.size();
  derived.modified_files = files.size();
  stats.counts = mining.value_or(derived);

  stats.query_tokens = distribution(std::move(query), caps.query);
  stats.output_tokens = distribution(std::move(output), caps.output);
  stats.prev_change_tokens = distribution(std::move(prev), caps.prev_change);
  stats.signature_tokens = distribution(std::move(signature), caps.signature);
  return stats;
}

std::string stats_to_json(const DatasetStats& stats) {
  auto dist = [](const TokenDistribution& d) {
    return json{{"median", d.median}, {"mean", d.mean}, {"max", d.max}, {"cap", d.cap}, {"fraction_at_cap", d.fraction_at_cap}};
  };
  json j = json::parse(counts_to_json(stats.counts));
  j["schema"] = "coedit-stats/1";
  j["instances"] = stats.instances;
  j["tokens"] = {{"query", dist(stats.query_tokens)},
                 {"output", dist(stats.output_tokens)},
                 {"prev_change", dist(stats.prev_change_tokens)},
                 {"signature", dist(stats.signature_tokens)}};
  return j.dump(2);
}

}  // namespace coedit::miner
