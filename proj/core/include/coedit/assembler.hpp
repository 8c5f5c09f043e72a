#pragma once

#include <string>
#include <vector>

#include "coedit/encoding.hpp"
#include "coedit/miner.hpp"
#include "coedit/python/project_index.hpp"
#include "coedit/token_stream.hpp"
#include "coedit/tokenizer.hpp"

namespace coedit::context {

struct ContextLimits {
  std::size_t query_tokens = 1024;
  std::size_t block_tokens = 512;
  std::size_t reference_budget = 16384;
};

enum class BlockRole { Query, Reference };

struct Block {
  BlockRole role = BlockRole::Reference;
  TokenStream payload;
  std::size_t token_count = 0;

  /// "signature:<module>" or "change:<index>:<file>:<unit>", where index is
  /// the change's position in the prior-change list.
  std::string source;
  std::size_t part = 0;

  /// Admission rank; lower is admitted first. Unique within one segmentation.
  std::size_t priority = 0;

  /// A line longer than the block limit was cut to fit.
  bool truncated = false;

  std::string descriptor() const { return source + "#" + std::to_string(part); }
};

/// Splits the signature document (one chunk per module) and every prior
/// change into reference blocks of at most `limits.block_tokens` tokens,
/// cutting only at line boundaries. A single line over the limit is
/// truncated and its block flagged. Blocks are returned in priority order:
/// signature chunks in document order, then changes from the most recent to
/// the oldest.
std::vector<Block> segment_references(const std::vector<miner::PriorChange>& prior_changes,
                                      const python::SignatureDoc& signature_doc, const Tokenizer& tokenizer,
                                      const ContextLimits& limits = {});

/// Blocks of one line sequence, split at line boundaries; concatenating the
/// payloads gives back `stream` unless a line had to be truncated.
std::vector<Block> segment_stream(const TokenStream& stream, const std::string& source, const Tokenizer& tokenizer,
                                  std::size_t block_tokens);

struct Admission {
  std::vector<Block> admitted;
  std::vector<Block> dropped;
};

/// Admits blocks by ascending priority while they fit in `budget`; the first
/// block that does not fit and every later one are dropped. The outcome does
/// not depend on the order of `blocks`.
Admission admit(std::vector<Block> blocks, std::size_t budget);

struct AssembledContext {
  Block query;
  /// The region relative to the (possibly truncated) query.
  EditRegion region;
  /// Unit lines cut from the top of the query.
  int first_line = 0;
  std::vector<LineStatus> statuses;
  std::vector<Block> references;
  std::vector<std::string> dropped;

  std::size_t reference_tokens() const;
};

/// Encodes the query, cutting lines outside the region symmetrically (the
/// same number of context lines on each side, as far as available) until it
/// fits `limits.query_tokens`; throws QueryOverflow if the region alone does
/// not fit. References are segmented and admitted against the budget.
AssembledContext assemble(const LineDiff& query, const EditRegion& region,
                          const std::vector<miner::PriorChange>& prior_changes,
                          const python::SignatureDoc& signature_doc, const Tokenizer& tokenizer,
                          const ContextLimits& limits = {});

AssembledContext assemble(const miner::ProblemInstance& instance, const Tokenizer& tokenizer,
                          const ContextLimits& limits = {});

}  // namespace coedit::context
