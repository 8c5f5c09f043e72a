#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coedit/assembler.hpp"
#include "coedit/metrics.hpp"

namespace coedit::cli {

/// Settings shared by every subcommand. Defaults match the library's.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string tokenizer;  // BPE vocabulary path; empty means COEDIT_TOKENIZER or the built-in tokenizer
  context::ContextLimits limits;
  metrics::KeystrokeParams keystrokes;
  int max_rounds = 6;
  int timeout_ms = 30000;

  /// Throws Error unless every budget is positive.
  void validate() const;
};

struct MineArgs {
  std::string repos;
  std::string out;
  std::size_t max_commits = 1000;
  bool multiround = false;
};

struct DeriveArgs {
  std::string in;
  std::string out;
  std::string kind = "multiround";
};

struct EncodeArgs {
  std::string instances;
  std::optional<std::size_t> index;
  bool json = false;
};

struct SimulateArgs {
  std::string instances;
  std::string oracle = "null";
  std::string out;
  std::optional<std::size_t> limit;
};

struct StatsArgs {
  std::string instances;
  std::string summary;
  std::string out;
};

struct MetricArgs {
  std::string kind;
  std::string before;
  std::string after;
};

int mine(const RunConfig& config, const MineArgs& args);
int derive_instances(const RunConfig& config, const DeriveArgs& args);
int encode(const RunConfig& config, const EncodeArgs& args);
int simulate(const RunConfig& config, const SimulateArgs& args);
int stats(const RunConfig& config, const StatsArgs& args);
int metric(const RunConfig& config, const MetricArgs& args);

}  // namespace coedit::cli
