#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "coedit/encoding.hpp"
#include "coedit/line_diff.hpp"
#include "coedit/token_stream.hpp"

namespace coedit::testing {

inline std::string random_line(std::mt19937_64& rng) {
  static const std::vector<std::string> pool = {
      "",        "x = 1",   "    return x", "<add>",   "<del> y", "<3>z",   "\\<1>", "\\",
      "def f():", "pass",   "a = b + c",    "  # note", "print(a)", "y = [1, 2]", "<12>", "if x:"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

inline std::vector<std::string> random_lines(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::vector<std::string> out(len(rng));
  for (auto& l : out) l = random_line(rng);
  return out;
}

/// A random statused unit of at least one line.
inline LineDiff random_unit(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> status(0, 4);
  LineDiff unit(len(rng));
  for (auto& l : unit) {
    int s = status(rng);
    l.status = s == 0 ? LineStatus::Add : (s == 1 ? LineStatus::Del : LineStatus::Empty);
    l.text = random_line(rng);
  }
  return unit;
}

inline EditRegion random_region(std::mt19937_64& rng, std::size_t m) {
  std::uniform_int_distribution<int> first(1, static_cast<int>(m));
  int a = first(rng);
  std::uniform_int_distribution<int> extent(0, static_cast<int>(m) - a);
  return {a, extent(rng)};
}

/// A random edit that never deletes Add or Del lines.
inline TargetEdit random_edit(std::mt19937_64& rng, const LineDiff& unit, const EditRegion& region) {
  TargetEdit edit;
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_int_distribution<int> count(0, 2);
  for (int k = 1; k <= region.placeholder_count(); ++k) {
    const auto& line = unit[static_cast<std::size_t>(region.a + k - 2)];
    PlaceholderEdit e;
    if (coin(rng) == 0) {
      for (int c = count(rng) + 1; c > 0; --c) e.insertions.push_back(random_line(rng));
    }
    e.del = line.status == LineStatus::Empty && coin(rng) == 0;
    edit.set(k, std::move(e));
  }
  return edit;
}

// Splices each output segment into the input stream in place of its
// placeholder, then reads the result back as a plain line diff.
inline LineDiff substitute(const TokenStream& input, const TokenStream& output) {
  std::map<int, std::vector<Token>> segments;
  int current = 0;
  for (const auto& t : output.tokens()) {
    if (t.kind == Token::Kind::Placeholder) {
      current = t.placeholder;
      segments[current];
      continue;
    }
    segments[current].push_back(t);
  }
  std::vector<Token> spliced;
  bool pending_delete = false;
  for (const auto& t : input.tokens()) {
    if (t.kind == Token::Kind::Placeholder) {
      pending_delete = false;
      for (const auto& s : segments[t.placeholder]) {
        if (s.kind == Token::Kind::Del) {
          pending_delete = true;
        } else {
          spliced.push_back(s);
        }
      }
      if (pending_delete) spliced.push_back(Token::del());
      continue;
    }
    spliced.push_back(t);
  }
  return parse_input(TokenStream::parse(TokenStream(std::move(spliced)).render())).lines;
}

}  // namespace coedit::testing
