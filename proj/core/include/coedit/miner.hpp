#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coedit/encoding.hpp"
#include "coedit/python/import_graph.hpp"
#include "coedit/python/project_index.hpp"
#include "coedit/python/units.hpp"
#include "coedit/tokenizer.hpp"

namespace coedit::miner {

/// Python sources keyed by repository-relative path.
using Snapshot = std::map<std::string, std::string>;

enum class ChangeKind { Added, Deleted, Modified };

std::string_view to_string(ChangeKind kind);
ChangeKind change_kind_from_string(std::string_view text);

struct UnitChange {
  ChangeKind kind = ChangeKind::Modified;
  std::string file;
  python::UnitId id;
  std::optional<python::CodeUnit> before;
  std::optional<python::CodeUnit> after;
  LineDiff diff;  // all Add for Added, all Del for Deleted

  /// Position used for ordering: the after-version start line, or the
  /// before-version one for deletions.
  int start_line() const;
};

struct CommitDiff {
  std::vector<UnitChange> changes;
  std::vector<std::string> warnings;  // files skipped because they did not parse
};

/// Unit-level changes between two snapshots. Units are matched by file and
/// qualified name; only files whose text differs are compared.
CommitDiff diff_commit(const Snapshot& before, const Snapshot& after);

/// Orders changes by the import order of their modules (imported modules
/// first, cycles collapsed, ties by path), then by start line.
std::vector<UnitChange> order_changes(std::vector<UnitChange> changes, const python::ImportGraph& graph);

struct PriorChange {
  std::string file;
  std::string unit;
  ChangeKind kind = ChangeKind::Modified;
  LineDiff diff;

  friend bool operator==(const PriorChange&, const PriorChange&) = default;
};

/// One editing problem: predict `ground_truth` for `query` given the earlier
/// changes of the same commit and the signatures the unit uses.
struct ProblemInstance {
  std::string project;
  std::string commit;
  std::string parent;
  std::string file;
  python::UnitId unit;

  LineDiff query;
  EditRegion region;
  TargetEdit ground_truth;
  std::vector<PriorChange> prior_changes;
  python::SignatureDoc signature_doc;

  /// Query with the ground truth applied.
  LineDiff total() const { return apply_edit(query, region, ground_truth); }
};

struct Provenance {
  std::string project;
  std::string commit;
  std::string parent;
};

/// One instance per Modified change, with every earlier change as context
/// and the signature document computed from `parent_index`. The query is the
/// unit's pre-commit text; when the change ends with added lines an empty
/// anchor line is appended so the insertions have a placeholder.
std::vector<ProblemInstance> make_instances(const std::vector<UnitChange>& ordered,
                                            const python::ProjectIndex& parent_index, const Provenance& provenance);

/// Groups of a target's line changes: within each contiguous hunk the i-th
/// deletion is paired with the i-th insertion; unpaired lines stand alone.
/// Indices refer to EditPlan::change_indices().
std::vector<std::vector<std::size_t>> change_groups(const EditPlan& plan);

/// Inlines a uniformly drawn non-empty proper subset of change groups into
/// the query and keeps the rest as the target. Throws NotEligible when the
/// target has fewer than two changed lines or fewer than two groups.
ProblemInstance synthesize_multiround(const ProblemInstance& instance, std::mt19937_64& rng);

enum class CompletionKind { Added, Modified };

/// Single-line completion derived from an instance's last change.
struct CompletionProblem {
  ProblemInstance instance;  // every other change inlined; the target inserts one line
  CompletionKind kind = CompletionKind::Added;
  std::string target_line;
  std::vector<std::string> plain_prefix;  // post-change text before the missing line
  std::vector<std::string> plain_suffix;  // post-change text after it
};

/// Instances whose last change is a deletion are dropped.
std::vector<CompletionProblem> make_completion_instances(const std::vector<ProblemInstance>& instances);

struct MineOptions {
  std::size_t max_commits = 1000;
};

struct MiningCounts {
  std::size_t projects = 0;
  std::size_t commits = 0;       // non-root, non-merge commits examined
  std::size_t used_commits = 0;  // commits yielding at least one instance
  std::size_t modified_files = 0;
  std::size_t modified_units = 0;
  std::size_t modified_functions = 0;
  std::size_t added_units = 0;
  std::size_t deleted_units = 0;
  std::size_t changed_lines = 0;  // over Modified changes
  std::size_t skipped_files = 0;

  MiningCounts& operator+=(const MiningCounts& other);
  friend bool operator==(const MiningCounts&, const MiningCounts&) = default;
};

struct MiningResult {
  std::vector<ProblemInstance> instances;
  MiningCounts counts;
  std::vector<std::string> warnings;
};

/// Walks the first-parent history of a repository and mines instances from
/// every non-merge commit, oldest first.
MiningResult mine_repository(const std::filesystem::path& repo, const std::string& project, const MineOptions& options);

// ---- serialization ------------------------------------------------------------

inline constexpr const char* kInstanceSchema = "coedit/1";

/// One JSON object per line. Token streams use the canonical rendering.
std::string instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const std::string& line);

std::string completion_to_json(const CompletionProblem& problem);

void write_instances(std::ostream& out, const std::vector<ProblemInstance>& instances);

/// Reads every non-blank line. Throws DataError with the line number.
std::vector<ProblemInstance> read_instances(std::istream& in);

std::string counts_to_json(const MiningCounts& counts);
MiningCounts counts_from_json(const std::string& text);

// ---- statistics -----------------------------------------------------------------

struct TokenDistribution {
  double median = 0;
  double mean = 0;
  std::size_t max = 0;
  double fraction_at_cap = 0;  // fraction of values >= cap
  std::size_t cap = 0;
};

TokenDistribution distribution(std::vector<std::size_t> values, std::size_t cap);

struct DatasetStats {
  MiningCounts counts;
  std::size_t instances = 0;
  TokenDistribution query_tokens;
  TokenDistribution output_tokens;
  TokenDistribution prev_change_tokens;
  TokenDistribution signature_tokens;
};

struct StatsCaps {
  std::size_t query = 1024;
  std::size_t output = 512;
  std::size_t prev_change = 16384;
  std::size_t signature = 15872;
};

/// Token statistics over the instances. Counts come from `mining` when
/// given; otherwise projects, commits, files, units and changed lines are
/// derived from the instances themselves.
DatasetStats dataset_stats(const std::vector<ProblemInstance>& instances, const Tokenizer& tokenizer,
                           const std::optional<MiningCounts>& mining = std::nullopt, const StatsCaps& caps = {});

std::string stats_to_json(const DatasetStats& stats);

}  // namespace coedit::miner
