#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coedit {

enum class LineStatus { Empty, Add, Del };

/// Token spelling of a status; Empty renders as nothing.
std::string_view status_token(LineStatus status);

struct StatusedLine {
  LineStatus status = LineStatus::Empty;
  std::string text;

  friend bool operator==(const StatusedLine&, const StatusedLine&) = default;
};

/// A sequence of kept, added and deleted lines.
using LineDiff = std::vector<StatusedLine>;

/// Lines whose status is not Add, i.e. the text before the change.
std::vector<std::string> before_lines(const LineDiff& diff);

/// Lines whose status is not Del, i.e. the text after the change.
std::vector<std::string> after_lines(const LineDiff& diff);

/// Number of lines with a non-Empty status.
std::size_t changed_line_count(const LineDiff& diff);

/// Line-level diff based on a longest common subsequence with leftmost
/// matching. Within a run of changes all deletions precede all additions.
LineDiff line_diff(const std::vector<std::string>& before, const std::vector<std::string>& after);

/// Splits text into lines. A trailing newline does not produce an extra
/// empty line, and carriage returns before newlines are dropped.
std::vector<std::string> split_lines(std::string_view text);

/// Joins lines with '\n' (no trailing newline).
std::string join_lines(const std::vector<std::string>& lines);

/// Removes trailing spaces, tabs and carriage returns.
std::string rstrip(std::string_view text);

}  // namespace coedit
