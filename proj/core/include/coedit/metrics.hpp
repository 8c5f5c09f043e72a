#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coedit/line_diff.hpp"

namespace coedit::metrics {

struct KeystrokeParams {
  int cursor_jump_cost = 4;
  // Each manual edit starts away from its location, so the default equals
  // the jump cost.
  int init_cursor_dis = 4;
};

struct EditCostReport {
  std::int64_t lines = 0;
  std::int64_t levenshtein = 0;
  std::int64_t keystrokes = 0;

  EditCostReport& operator+=(const EditCostReport& other);
  friend bool operator==(const EditCostReport&, const EditCostReport&) = default;
};

/// Ground-truth cost minus accumulated manual cost, per metric. Levenshtein
/// and keystroke gains can be negative.
struct GainReport {
  std::int64_t lines = 0;
  std::int64_t levenshtein = 0;
  std::int64_t keystrokes = 0;

  friend bool operator==(const GainReport&, const GainReport&) = default;
};

/// Number of added plus deleted lines.
std::int64_t lines_cost(const LineDiff& diff);

/// Character edit distance over Unicode code points (UTF-8 input).
std::int64_t levenshtein(std::string_view a, std::string_view b);

/// Cursor-aware keystroke distance.
///
/// The edit is processed front to back from the state (i = |input|,
/// j = |output|, cursor_dis = init, deleting = false) to (0, 0, *, false)
/// with these operations, where input[-i] is the next unprocessed input
/// character:
///
///   M  match            cost 0  input[-i] == output[-j], !deleting: i--, j--, cursor_dis++
///   D  delete char      cost 1  cursor_dis == 0, !deleting:         i--
///   A  add char         cost 1  cursor_dis == 0, !deleting:         j--
///   C  move cursor      cost min(cursor_dis, jump)                  cursor_dis = 0
///   S  start deletion   cost 1  cursor_dis == 0, !deleting:         deleting = true
///   K  keep deleting    cost 0  deleting:                           i--
///   E  end deletion     cost 1  cursor_dis == 0, deleting:          deleting = false
///
/// K deletes at the cursor and leaves cursor_dis unchanged. cursor_dis is
/// clamped at max(jump, 1) since no cost or guard distinguishes larger
/// values, giving O(|input| * |output| * jump) time.
std::int64_t keystroke_cost(std::string_view input, std::string_view output, const KeystrokeParams& params = {});

/// String equality after semantic-preserving normalization; falls back to
/// comparing the raw (whitespace-trimmed) text when either side fails to
/// parse.
bool exact_match(std::string_view prediction, std::string_view truth);

/// Cost of turning `before` into `after`: changed lines from the line diff,
/// character metrics over the newline-joined texts.
EditCostReport edit_cost(const std::vector<std::string>& before, const std::vector<std::string>& after,
                         const KeystrokeParams& params = {});

GainReport total_gain(const EditCostReport& ground_truth, const std::vector<EditCostReport>& manual);

/// Decodes UTF-8 into code points; invalid bytes map to themselves.
std::u32string decode_utf8(std::string_view text);

}  // namespace coedit::metrics
