#include "coedit/encoding.hpp"

#include <algorithm>

#include "coedit/error.hpp"

namespace coedit {

void validate_region(const EditRegion& region, std::size_t line_count) {
  if (region.a < 1 || region.n < 0 || static_cast<std::size_t>(region.last()) > line_count) {
    throw RegionOutOfBounds("edit region [" + std::to_string(region.a) + ", " +
                            std::to_string(region.last()) + "] outside unit of " +
                            std::to_string(line_count) + " lines");
  }
}

void TargetEdit::insert(int placeholder, std::string line) {
  entries_[placeholder].insertions.push_back(std::move(line));
}

void TargetEdit::mark_delete(int placeholder) { entries_[placeholder].del = true; }

void TargetEdit::set(int placeholder, PlaceholderEdit edit) {
  if (edit.empty()) {
    entries_.erase(placeholder);
  } else {
    entries_[placeholder] = std::move(edit);
  }
}

PlaceholderEdit TargetEdit::at(int placeholder) const {
  auto it = entries_.find(placeholder);
  return it == entries_.end() ? PlaceholderEdit{} : it->second;
}

std::size_t TargetEdit::line_change_count() const {
  std::size_t count = 0;
  for (const auto& [k, e] : entries_) count += e.insertions.size() + (e.del ? 1 : 0);
  return count;
}

std::vector<LineStatus> statuses_of(const LineDiff& unit) {
  std::vector<LineStatus> out;
  out.reserve(unit.size());
  for (const auto& l : unit) out.push_back(l.status);
  return out;
}

namespace {

void push_status(TokenStream& out, LineStatus status) {
  if (status == LineStatus::Add) out.push(Token::add());
  if (status == LineStatus::Del) out.push(Token::del());
}

void push_text(TokenStream& out, const std::string& text) {
  if (!text.empty()) out.push(Token::make_text(text));
}

TokenStream encode_rows(const LineDiff& unit, const std::optional<EditRegion>& region) {
  TokenStream out;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (i > 0) out.push(Token::newline());
    if (region && region->contains_line(line)) out.push(Token::make_placeholder(line - region->a + 1));
    push_status(out, unit[i].status);
    push_text(out, unit[i].text);
  }
  return out;
}

void check_placeholders(const TargetEdit& edit, const EditRegion& region) {
  for (const auto& [k, e] : edit.entries()) {
    if (k < 1 || k > region.placeholder_count()) {
      throw RegionOutOfBounds("placeholder <" + std::to_string(k) + "> outside region of " +
                              std::to_string(region.placeholder_count()) + " lines");
    }
  }
}

void check_delete(const std::vector<LineStatus>& statuses, const EditRegion& region, int k) {
  const auto line = static_cast<std::size_t>(region.a + k - 1);
  if (line <= statuses.size() && statuses[line - 1] == LineStatus::Add) {
    throw InvalidDelete("placeholder <" + std::to_string(k) + "> deletes a line that was just added");
  }
}

}  // namespace

TokenStream enc_input(const LineDiff& unit, const EditRegion& region) {
  validate_region(region, unit.size());
  return encode_rows(unit, region);
}

TokenStream enc_context(const LineDiff& diff) { return encode_rows(diff, std::nullopt); }

DecodedInput parse_input(const TokenStream& stream) {
  DecodedInput out;
  int first = 0;
  int expected = 1;
  bool gap_after_region = false;

  auto finish_row = [&](const std::vector<const Token*>& row) {
    std::size_t pos = 0;
    const int line = static_cast<int>(out.lines.size()) + 1;
    if (pos < row.size() && row[pos]->kind == Token::Kind::Placeholder) {
      if (row[pos]->placeholder != expected || gap_after_region) {
        throw MalformedOutput("unexpected placeholder <" + std::to_string(row[pos]->placeholder) +
                              "> on line " + std::to_string(line));
      }
      if (expected == 1) first = line;
      ++expected;
      ++pos;
    } else if (expected > 1) {
      gap_after_region = true;
    }
    StatusedLine parsed;
    if (pos < row.size() && (row[pos]->kind == Token::Kind::Add || row[pos]->kind == Token::Kind::Del)) {
      parsed.status = row[pos]->kind == Token::Kind::Add ? LineStatus::Add : LineStatus::Del;
      ++pos;
    }
    if (pos < row.size() && row[pos]->kind == Token::Kind::Text) {
      parsed.text = row[pos]->text;
      ++pos;
    }
    if (pos != row.size()) throw MalformedOutput("unexpected token on input line " + std::to_string(line));
    out.lines.push_back(std::move(parsed));
  };

  std::vector<const Token*> row;
  for (const auto& t : stream.tokens()) {
    if (t.kind == Token::Kind::Newline) {
      finish_row(row);
      row.clear();
    } else {
      row.push_back(&t);
    }
  }
  finish_row(row);

  if (expected > 1) out.region = EditRegion{first, expected - 2};
  return out;
}

TokenStream enc_output(const TargetEdit& edit, const EditRegion& region,
                       const std::vector<LineStatus>& unit_statuses) {
  check_placeholders(edit, region);
  TokenStream out;
  for (int k = 1; k <= region.placeholder_count(); ++k) {
    out.push(Token::make_placeholder(k));
    const PlaceholderEdit e = edit.at(k);
    for (const auto& line : e.insertions) {
      out.push(Token::add());
      push_text(out, line);
      out.push(Token::newline());
    }
    if (e.del) {
      check_delete(unit_statuses, region, k);
      out.push(Token::del());
    }
  }
  return out;
}

TargetEdit parse_output(const TokenStream& stream, const std::vector<LineStatus>& unit_statuses,
                        const EditRegion& region) {
  validate_region(region, unit_statuses.size());
  TargetEdit edit;
  int current = 0;
  PlaceholderEdit entry;
  bool open_insertion = false;

  auto flush = [&] {
    if (current > 0) edit.set(current, std::move(entry));
    entry = {};
  };

  for (const auto& t : stream.tokens()) {
    switch (t.kind) {
      case Token::Kind::Newline:
        open_insertion = false;
        break;
      case Token::Kind::Placeholder:
        if (t.placeholder <= current || t.placeholder > region.placeholder_count()) {
          throw MalformedOutput("placeholder <" + std::to_string(t.placeholder) + "> out of order or range");
        }
        flush();
        current = t.placeholder;
        open_insertion = false;
        break;
      case Token::Kind::Add:
        if (current == 0 || entry.del) throw MalformedOutput("<add> outside a placeholder or after <del>");
        entry.insertions.emplace_back();
        open_insertion = true;
        break;
      case Token::Kind::Text:
        if (!open_insertion) throw MalformedOutput("stray text \"" + t.text + "\"");
        entry.insertions.back() = t.text;
        open_insertion = false;
        break;
      case Token::Kind::Del:
        if (current == 0 || entry.del) throw MalformedOutput("<del> outside a placeholder or repeated");
        check_delete(unit_statuses, region, current);
        entry.del = true;
        open_insertion = false;
        break;
    }
  }
  flush();
  return edit;
}

LineDiff apply_edit(const LineDiff& unit, const EditRegion& region, const TargetEdit& edit) {
  validate_region(region, unit.size());
  check_placeholders(edit, region);
  LineDiff out;
  out.reserve(unit.size() + edit.line_change_count());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    StatusedLine current = unit[i];
    if (region.contains_line(line)) {
      const int k = line - region.a + 1;
      const PlaceholderEdit e = edit.at(k);
      for (const auto& ins : e.insertions) out.push_back({LineStatus::Add, ins});
      if (e.del) {
        if (current.status == LineStatus::Add) {
          throw InvalidDelete("placeholder <" + std::to_string(k) + "> deletes a line that was just added");
        }
        current.status = LineStatus::Del;
      }
    }
    out.push_back(std::move(current));
  }
  return out;
}

TargetEdit edit_from_diff(const LineDiff& diff) {
  TargetEdit edit;
  std::vector<std::string> pending;
  int base = 0;
  for (const auto& line : diff) {
    if (line.status == LineStatus::Add) {
      pending.push_back(line.text);
      continue;
    }
    ++base;
    PlaceholderEdit e;
    e.insertions = std::move(pending);
    pending.clear();
    e.del = line.status == LineStatus::Del;
    edit.set(base, std::move(e));
  }
  if (!pending.empty()) throw Error("edit_from_diff: diff ends with insertions and has no anchor line");
  return edit;
}

EditPlan::EditPlan(const LineDiff& query, const EditRegion& region, const TargetEdit& edit) : region_(region) {
  validate_region(region, query.size());
  check_placeholders(edit, region);
  for (std::size_t i = 0; i < query.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    Entry base{query[i], query[i].status, false, line};
    if (region.contains_line(line)) {
      const PlaceholderEdit e = edit.at(line - region.a + 1);
      for (const auto& ins : e.insertions) {
        changes_.push_back(entries_.size());
        entries_.push_back({{LineStatus::Add, ins}, LineStatus::Add, true, 0});
      }
      if (e.del) {
        if (base.base_status == LineStatus::Add) {
          throw InvalidDelete("line " + std::to_string(line) + " was just added and cannot be deleted");
        }
        base.line.status = LineStatus::Del;
        base.is_change = base.base_status != LineStatus::Del;
      }
    }
    if (base.is_change) changes_.push_back(entries_.size());
    entries_.push_back(std::move(base));
  }
}

LineDiff EditPlan::total() const {
  LineDiff out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.line);
  return out;
}

EditPlan::Split EditPlan::split(const std::vector<bool>& inlined) const {
  if (inlined.size() != changes_.size()) throw Error("EditPlan::split: selection size mismatch");

  const auto region_begin = static_cast<std::size_t>(
      std::find_if(entries_.begin(), entries_.end(),
                   [&](const Entry& e) { return e.base_line == 0 || e.base_line >= region_.a; }) -
      entries_.begin());

  Split out;
  std::vector<std::pair<std::size_t, PlaceholderEdit>> attached;  // by query index
  std::vector<std::string> pending;
  std::size_t change_no = 0;
  std::size_t first_query = 0;
  bool have_first = false;
  std::size_t last_query = 0;

  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    const bool applied = e.is_change && inlined[change_no];
    if (e.is_change) ++change_no;

    bool pending_delete = false;
    if (e.base_line == 0) {
      if (!applied) {
        pending.push_back(e.line.text);
        continue;
      }
      out.query.push_back(e.line);
    } else {
      StatusedLine line = e.line;
      if (e.is_change && !applied) {
        line.status = e.base_status;
        pending_delete = true;
      }
      out.query.push_back(std::move(line));
      if (e.base_line == region_.last()) last_query = out.query.size() - 1;
    }

    const std::size_t q = out.query.size() - 1;
    if (!have_first && i >= region_begin) {
      first_query = q;
      have_first = true;
    }
    if (!pending.empty() || pending_delete) {
      PlaceholderEdit pe;
      pe.insertions = std::move(pending);
      pending.clear();
      pe.del = pending_delete;
      attached.emplace_back(q, std::move(pe));
    }
  }

  out.region = EditRegion{static_cast<int>(first_query) + 1, static_cast<int>(last_query - first_query)};
  for (auto& [q, pe] : attached) out.target.set(static_cast<int>(q - first_query) + 1, std::move(pe));
  return out;
}

}  // namespace coedit
