#include "coedit/assembler.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "coedit/error.hpp"

namespace coedit::context {

namespace {

using Row = std::vector<Token>;

std::vector<Row> rows_of(const TokenStream& stream) {
  std::vector<Row> rows(1);
  for (const auto& t : stream.tokens()) {
    rows.back().push_back(t);
    if (t.kind == Token::Kind::Newline) rows.emplace_back();
  }
  if (rows.back().empty()) rows.pop_back();
  return rows;
}

std::size_t count_tokens(const std::vector<Token>& tokens, const Tokenizer& tokenizer) {
  return tokenizer.count(TokenStream(tokens).render());
}

/// Longest prefix of the row's text, cut at a character boundary, that keeps
/// the row within `limit` tokens.
Row truncate_row(const Row& row, const Tokenizer& tokenizer, std::size_t limit) {
  Row head;
  std::string text;
  bool newline = false;
  for (const auto& t : row) {
    if (t.kind == Token::Kind::Text) {
      text += t.text;
    } else if (t.kind == Token::Kind::Newline) {
      newline = true;
    } else {
      head.push_back(t);
    }
  }
  auto build = [&](std::size_t length) {
    Row r = head;
    if (length > 0) r.push_back(Token::make_text(text.substr(0, length)));
    if (newline) r.push_back(Token::newline());
    return r;
  };
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) cuts.push_back(i);
  }
  std::size_t lo = 0;
  std::size_t hi = cuts.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (count_tokens(build(cuts[mid]), tokenizer) <= limit) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return build(cuts[lo]);
}

TokenStream text_stream(const std::string& text) {
  TokenStream s;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) s.push(Token::newline());
    if (!lines[i].empty()) s.push(Token::make_text(lines[i]));
  }
  return s;
}

}  // namespace

std::vector<Block> segment_stream(const TokenStream& stream, const std::string& source, const Tokenizer& tokenizer,
                                  std::size_t block_tokens) {
  std::vector<Block> blocks;
  Block current;
  current.source = source;
  auto flush = [&] {
    if (current.payload.empty()) return;
    current.token_count = count_tokens(current.payload.tokens(), tokenizer);
    blocks.push_back(std::move(current));
    current = Block{};
    current.source = source;
    current.part = blocks.size();
  };
  for (const auto& row : rows_of(stream)) {
    std::vector<Token> candidate = current.payload.tokens();
    candidate.insert(candidate.end(), row.begin(), row.end());
    if (count_tokens(candidate, tokenizer) <= block_tokens) {
      current.payload = TokenStream(std::move(candidate));
      continue;
    }
    flush();
    if (count_tokens(row, tokenizer) <= block_tokens) {
      current.payload = TokenStream(row);
      continue;
    }
    current.payload = TokenStream(truncate_row(row, tokenizer, block_tokens));
    current.truncated = true;
    flush();
  }
  flush();
  return blocks;
}

std::vector<Block> segment_references(const std::vector<miner::PriorChange>& prior_changes,
                                      const python::SignatureDoc& signature_doc, const Tokenizer& tokenizer,
                                      const ContextLimits& limits) {
  std::vector<Block> out;
  auto append = [&](std::vector<Block> blocks) {
    for (auto& b : blocks) {
      b.priority = out.size();
      out.push_back(std::move(b));
    }
  };

  const auto& entries = signature_doc.entries;
  for (std::size_t i = 0; i < entries.size();) {
    python::SignatureDoc chunk;
    std::size_t j = i;
    while (j < entries.size() && entries[j].module == entries[i].module) chunk.entries.push_back(entries[j++]);
    append(segment_stream(text_stream(chunk.render()), "signature:" + entries[i].module, tokenizer,
                          limits.block_tokens));
    i = j;
  }
  for (std::size_t k = prior_changes.size(); k-- > 0;) {
    const auto& c = prior_changes[k];
    append(segment_stream(enc_context(c.diff), "change:" + std::to_string(k) + ":" + c.file + ":" + c.unit,
                          tokenizer, limits.block_tokens));
  }
  return out;
}

Admission admit(std::vector<Block> blocks, std::size_t budget) {
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return std::tie(a.priority, a.source, a.part) < std::tie(b.priority, b.source, b.part);
  });
  Admission result;
  std::size_t used = 0;
  bool full = false;
  for (auto& b : blocks) {
    if (!full && used + b.token_count <= budget) {
      used += b.token_count;
      result.admitted.push_back(std::move(b));
    } else {
      full = true;
      result.dropped.push_back(std::move(b));
    }
  }
  return result;
}

std::size_t AssembledContext::reference_tokens() const {
  return std::accumulate(references.begin(), references.end(), std::size_t{0},
                         [](std::size_t s, const Block& b) { return s + b.token_count; });
}

AssembledContext assemble(const LineDiff& query, const EditRegion& region,
                          const std::vector<miner::PriorChange>& prior_changes,
                          const python::SignatureDoc& signature_doc, const Tokenizer& tokenizer,
                          const ContextLimits& limits) {
  validate_region(region, query.size());
  const int m = static_cast<int>(query.size());
  const int above = region.a - 1;
  const int below = m - region.last();

  auto window = [&](int margin) {
    const int first = region.a - std::min(margin, above);
    const int last = region.last() + std::min(margin, below);
    LineDiff lines(query.begin() + first - 1, query.begin() + last);
    const EditRegion shifted{region.a - first + 1, region.n};
    TokenStream stream = enc_input(lines, shifted);
    const std::size_t tokens = tokenizer.count(stream.render());
    return std::make_tuple(first, std::move(lines), shifted, std::move(stream), tokens);
  };

  int lo = 0;
  int hi = std::max(above, below);
  if (std::get<4>(window(0)) > limits.query_tokens) {
    throw QueryOverflow("edit region needs more than " + std::to_string(limits.query_tokens) + " tokens");
  }
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (std::get<4>(window(mid)) <= limits.query_tokens) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  auto [first, lines, shifted, stream, tokens] = window(lo);

  AssembledContext ctx;
  ctx.query.role = BlockRole::Query;
  ctx.query.source = "query";
  ctx.query.payload = std::move(stream);
  ctx.query.token_count = tokens;
  ctx.query.truncated = static_cast<int>(lines.size()) < m;
  ctx.region = shifted;
  ctx.first_line = first - 1;
  ctx.statuses = statuses_of(lines);

  auto admission = admit(segment_references(prior_changes, signature_doc, tokenizer, limits), limits.reference_budget);
  ctx.references = std::move(admission.admitted);
  for (const auto& b : admission.dropped) ctx.dropped.push_back(b.descriptor());
  return ctx;
}

AssembledContext assemble(const miner::ProblemInstance& instance, const Tokenizer& tokenizer,
                          const ContextLimits& limits) {
  return assemble(instance.query, instance.region, instance.prior_changes, instance.signature_doc, tokenizer, limits);
}

}  // namespace coedit::context
