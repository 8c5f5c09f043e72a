#include "coedit/line_diff.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace coedit {

std::string_view status_token(LineStatus status) {
  switch (status) {
    case LineStatus::Add:
      return "<add>";
    case LineStatus::Del:
      return "<del>";
    case LineStatus::Empty:
      break;
  }
  return "";
}

std::vector<std::string> before_lines(const LineDiff& diff) {
  std::vector<std::string> out;
  for (const auto& line : diff) {
    if (line.status != LineStatus::Add) out.push_back(line.text);
  }
  return out;
}

std::vector<std::string> after_lines(const LineDiff& diff) {
  std::vector<std::string> out;
  for (const auto& line : diff) {
    if (line.status != LineStatus::Del) out.push_back(line.text);
  }
  return out;
}

std::size_t changed_line_count(const LineDiff& diff) {
  return static_cast<std::size_t>(std::count_if(
      diff.begin(), diff.end(), [](const StatusedLine& l) { return l.status != LineStatus::Empty; }));
}

LineDiff line_diff(const std::vector<std::string>& before, const std::vector<std::string>& after) {
  // Intern lines so the quadratic table compares integers.
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto intern = [&](const std::vector<std::string>& lines) {
    std::vector<std::uint32_t> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
      auto [it, inserted] = ids.try_emplace(l, static_cast<std::uint32_t>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  const auto a = intern(before);
  const auto b = intern(after);

  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }

  const std::size_t n = a.size() - prefix - suffix;
  const std::size_t m = b.size() - prefix - suffix;

  // lcs[i][j] = LCS length of a[prefix+i..] and b[prefix+j..] within the middle window.
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> lcs((n + 1) * width, 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return lcs[i * width + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      if (a[prefix + i] == b[prefix + j]) {
        at(i, j) = at(i + 1, j + 1) + 1;
      } else {
        at(i, j) = std::max(at(i + 1, j), at(i, j + 1));
      }
    }
  }

  LineDiff out;
  out.reserve(a.size() + b.size() - prefix - suffix);
  for (std::size_t k = 0; k < prefix; ++k) out.push_back({LineStatus::Empty, before[k]});

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[prefix + i] == b[prefix + j]) {
      out.push_back({LineStatus::Empty, before[prefix + i]});
      ++i;
      ++j;
    } else if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
      out.push_back({LineStatus::Del, before[prefix + i]});
      ++i;
    } else {
      out.push_back({LineStatus::Add, after[prefix + j]});
      ++j;
    }
  }

  for (std::size_t k = a.size() - suffix; k < a.size(); ++k) out.push_back({LineStatus::Empty, before[k]});
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::string rstrip(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && (text[end - 1] == ' ' || text[end - 1] == '\t' || text[end - 1] == '\r')) --end;
  return std::string(text.substr(0, end));
}

}  // namespace coedit
