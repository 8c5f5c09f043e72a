#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coedit/line_diff.hpp"
#include "coedit/token_stream.hpp"

namespace coedit {

/// Lines a..a+n (1-based, inclusive) of a unit carry placeholders
/// `<1>`..`<n+1>`.
struct EditRegion {
  int a = 1;
  int n = 0;

  int first() const { return a; }
  int last() const { return a + n; }
  int placeholder_count() const { return n + 1; }
  bool contains_line(int line) const { return line >= a && line <= a + n; }

  /// Region covering every line of an m-line unit.
  static EditRegion whole(int m) { return {1, m - 1}; }

  friend bool operator==(const EditRegion&, const EditRegion&) = default;
};

/// Throws RegionOutOfBounds unless 1 <= a <= a+n <= line_count.
void validate_region(const EditRegion& region, std::size_t line_count);

/// Changes attached to one placeholder: lines inserted before its line and
/// whether the line itself is deleted.
struct PlaceholderEdit {
  std::vector<std::string> insertions;
  bool del = false;

  bool empty() const { return insertions.empty() && !del; }
  friend bool operator==(const PlaceholderEdit&, const PlaceholderEdit&) = default;
};

/// The decoded target change of a query. Only non-empty entries are stored,
/// so two edits compare equal iff they describe the same change.
class TargetEdit {
 public:
  const std::map<int, PlaceholderEdit>& entries() const { return entries_; }

  void insert(int placeholder, std::string line);
  void mark_delete(int placeholder);
  void set(int placeholder, PlaceholderEdit edit);

  /// Entry for a placeholder, empty when absent.
  PlaceholderEdit at(int placeholder) const;

  bool empty() const { return entries_.empty(); }

  /// Number of single-line changes (insertions plus deletions).
  std::size_t line_change_count() const;

  friend bool operator==(const TargetEdit&, const TargetEdit&) = default;

 private:
  std::map<int, PlaceholderEdit> entries_;
};

std::vector<LineStatus> statuses_of(const LineDiff& unit);

/// Encodes a statused unit with placeholders on the region lines, one row
/// per line: `[<k>][<add>|<del>]text`.
TokenStream enc_input(const LineDiff& unit, const EditRegion& region);

/// Encodes a contextual change: same row format, no placeholders.
TokenStream enc_context(const LineDiff& diff);

struct DecodedInput {
  LineDiff lines;
  std::optional<EditRegion> region;
};

/// Inverse of enc_input / enc_context. Throws MalformedOutput on streams
/// that are not of that shape.
DecodedInput parse_input(const TokenStream& stream);

/// Encodes the target change. Every placeholder of the region is emitted,
/// each insertion followed by a newline. Throws InvalidDelete when a line
/// whose status is Add would be deleted.
TokenStream enc_output(const TargetEdit& edit, const EditRegion& region,
                       const std::vector<LineStatus>& unit_statuses);

/// Decodes an output stream. Placeholders may be omitted but must appear in
/// increasing order. `unit_statuses` covers the whole unit.
TargetEdit parse_output(const TokenStream& stream, const std::vector<LineStatus>& unit_statuses,
                        const EditRegion& region);

/// Substitutes every placeholder with its insertions and deletion.
LineDiff apply_edit(const LineDiff& unit, const EditRegion& region, const TargetEdit& edit);

/// Target edit that turns the before-side of `diff` into its after-side,
/// with the query being the before lines (all Empty) and the region the
/// whole unit. The last line of `diff` must be unchanged, since insertions
/// can only be placed before an existing line.
TargetEdit edit_from_diff(const LineDiff& diff);

/// A query merged with its full target edit, flattened so that individual
/// line changes can be switched between "already inlined" and "still to do".
class EditPlan {
 public:
  struct Entry {
    StatusedLine line;      // status in the fully applied result
    LineStatus base_status;  // status in the original query (Add for inserted lines)
    bool is_change = false;  // produced by the target edit
    int base_line = 0;       // 1-based line in the original query; 0 for inserted lines
  };

  EditPlan(const LineDiff& query, const EditRegion& region, const TargetEdit& edit);

  const std::vector<Entry>& entries() const { return entries_; }
  const EditRegion& region() const { return region_; }

  /// Indices (into entries()) of the target's line changes, top to bottom.
  const std::vector<std::size_t>& change_indices() const { return changes_; }
  std::size_t change_count() const { return changes_.size(); }

  /// The fully applied diff.
  LineDiff total() const;

  struct Split {
    LineDiff query;
    EditRegion region;
    TargetEdit target;
  };

  /// Inlines the changes flagged in `inlined` (indexed like change_indices())
  /// into the query and returns the remaining ones as the target.
  Split split(const std::vector<bool>& inlined) const;

 private:
  std::vector<Entry> entries_;
  std::vector<std::size_t> changes_;
  EditRegion region_;
};

}  // namespace coedit
