#include "coedit/metrics.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "coedit/python/normalize.hpp"

namespace coedit::metrics {

EditCostReport& EditCostReport::operator+=(const EditCostReport& other) {
  lines += other.lines;
  levenshtein += other.levenshtein;
  keystrokes += other.keystrokes;
  return *this;
}

std::int64_t lines_cost(const LineDiff& diff) { return static_cast<std::int64_t>(changed_line_count(diff)); }

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    if (lead >= 0xC0 && lead < 0xE0) extra = 1;
    else if (lead >= 0xE0 && lead < 0xF0) extra = 2;
    else if (lead >= 0xF0 && lead < 0xF8) extra = 3;

    bool valid = lead < 0x80 || (extra > 0 && i + extra < text.size());
    char32_t cp = extra == 0 ? lead : static_cast<char32_t>(lead & (0x3F >> extra));
    for (std::size_t k = 1; valid && k <= extra; ++k) {
      const auto next = static_cast<unsigned char>(text[i + k]);
      if ((next & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (next & 0x3F);
    }
    if (!valid) {
      out.push_back(lead);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::int64_t levenshtein(std::string_view a_text, std::string_view b_text) {
  std::u32string a = decode_utf8(a_text);
  std::u32string b = decode_utf8(b_text);

  // Common affixes never take part in an optimal alignment's edits.
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix + prefix < a.size() && suffix + prefix < b.size() &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  std::u32string_view x = std::u32string_view(a).substr(prefix, a.size() - prefix - suffix);
  std::u32string_view y = std::u32string_view(b).substr(prefix, b.size() - prefix - suffix);
  if (x.size() < y.size()) std::swap(x, y);
  if (y.empty()) return static_cast<std::int64_t>(x.size());

  // Single row over the shorter string.
  std::vector<std::int64_t> row(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) row[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::int64_t diag = row[0];
    row[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::int64_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[y.size()];
}

std::int64_t keystroke_cost(std::string_view input_text, std::string_view output_text,
                            const KeystrokeParams& params) {
  const std::u32string input = decode_utf8(input_text);
  const std::u32string output = decode_utf8(output_text);
  const int jump = std::max(params.cursor_jump_cost, 0);
  const int cap = std::max(jump, 1);
  const auto move_cost = [jump](int dis) -> std::int64_t { return std::min(dis, jump); };

  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  const std::size_t n = input.size();
  const std::size_t m = output.size();
  const std::size_t states = static_cast<std::size_t>(cap + 1) * 2;
  // Index: (j * (cap + 1) + c) * 2 + deleting, for one value of i.
  auto idx = [cap](std::size_t j, int c, int deleting) {
    return (j * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(c)) * 2 + static_cast<std::size_t>(deleting);
  };
  std::vector<std::int64_t> prev((m + 1) * states, inf);
  std::vector<std::int64_t> cur((m + 1) * states, inf);

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      // Characters consumed next when i / j remain.
      const bool can_match = i > 0 && j > 0 && input[n - i] == output[m - j];

      std::int64_t base_plain = inf;  // cursor at 0, not deleting, excluding S
      std::int64_t base_deleting = inf;  // cursor at 0, deleting, excluding E
      if (i == 0 && j == 0) base_plain = 0;
      if (can_match) base_plain = std::min(base_plain, prev[idx(j - 1, std::min(1, cap), 0)]);
      if (i > 0) base_plain = std::min(base_plain, 1 + prev[idx(j, 0, 0)]);
      if (j > 0) base_plain = std::min(base_plain, 1 + cur[idx(j - 1, 0, 0)]);
      if (i > 0) base_deleting = std::min(base_deleting, prev[idx(j, 0, 1)]);

      // S and E link the two cursor-at-0 states; each crossing costs 1.
      const std::int64_t plain0 = std::min(base_plain, base_deleting + 1);
      const std::int64_t deleting0 = std::min(base_deleting, base_plain + 1);
      cur[idx(j, 0, 0)] = plain0;
      cur[idx(j, 0, 1)] = deleting0;

      for (int c = 1; c <= cap; ++c) {
        std::int64_t plain = i == 0 && j == 0 ? 0 : move_cost(c) + plain0;
        if (can_match) plain = std::min(plain, prev[idx(j - 1, std::min(c + 1, cap), 0)]);
        std::int64_t deleting = move_cost(c) + deleting0;
        if (i > 0) deleting = std::min(deleting, prev[idx(j, c, 1)]);
        cur[idx(j, c, 0)] = plain;
        cur[idx(j, c, 1)] = deleting;
      }
    }
    std::swap(prev, cur);
  }
  const int start = std::min(std::max(params.init_cursor_dis, 0), cap);
  return prev[idx(m, start, 0)];
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool exact_match(std::string_view prediction, std::string_view truth) {
  const auto p = python::normalize_code(prediction);
  const auto t = python::normalize_code(truth);
  if (p.normalized && t.normalized) return p.code == t.code;
  return trim(prediction) == trim(truth);
}

EditCostReport edit_cost(const std::vector<std::string>& before, const std::vector<std::string>& after,
                         const KeystrokeParams& params) {
  EditCostReport report;
  report.lines = lines_cost(line_diff(before, after));
  const std::string a = join_lines(before);
  const std::string b = join_lines(after);
  report.levenshtein = levenshtein(a, b);
  report.keystrokes = keystroke_cost(a, b, params);
  return report;
}

GainReport total_gain(const EditCostReport& ground_truth, const std::vector<EditCostReport>& manual) {
  EditCostReport spent;
  for (const auto& m : manual) spent += m;
  return {ground_truth.lines - spent.lines, ground_truth.levenshtein - spent.levenshtein,
          ground_truth.keystrokes - spent.keystrokes};
}

}  // namespace coedit::metrics
