#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coedit/assembler.hpp"
#include "coedit/channel.hpp"
#include "coedit/encoding.hpp"
#include "coedit/metrics.hpp"
#include "coedit/miner.hpp"
#include "coedit/tokenizer.hpp"

namespace coedit::sim {

inline constexpr const char* kOracleProtocol = "coedit-oracle/1";
inline constexpr const char* kReportSchema = "coedit-report/1";

/// What an oracle sees in one round. `remaining_truth` is the harness's own
/// bookkeeping and is only consulted by the built-in truth oracle; it is
/// never sent over the wire.
struct RoundInput {
  const context::AssembledContext& context;
  const TargetEdit& remaining_truth;
};

/// One episode's conversation with an oracle. Calls are sequential.
class OracleSession {
 public:
  virtual ~OracleSession() = default;

  /// Canonical output-stream text. Throws OracleFailure.
  virtual std::string predict(const RoundInput& input) = 0;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance& instance) = 0;

  /// Sessions that may be active at the same time.
  virtual std::size_t max_concurrency() const { return SIZE_MAX; }
  virtual std::string name() const = 0;
};

/// Never suggests anything.
std::shared_ptr<Oracle> null_oracle();

/// Suggests exactly the remaining ground truth.
std::shared_ptr<Oracle> truth_oracle();

/// For every unchanged region line whose text (ignoring indentation) was
/// replaced or deleted in one of the reference changes, suggests the same
/// change, re-indented to the line.
std::shared_ptr<Oracle> echo_oracle();

struct OracleOptions {
  std::chrono::milliseconds timeout{30000};
  /// Standard error of `cmd:` oracles is discarded when set.
  bool quiet = false;
};

/// An oracle speaking the line protocol over `channel`. Reads the handshake
/// first; throws OracleFailure when it is missing or names another protocol.
std::shared_ptr<Oracle> wire_oracle(std::unique_ptr<LineChannel> channel, std::string name,
                                    const OracleOptions& options = {});

/// "null", "truth", "echo", "cmd:<argv...>" (whitespace separated, no
/// quoting) or "tcp:<host>:<port>". Throws Error for an unknown kind.
std::shared_ptr<Oracle> make_oracle(const std::string& kind, const OracleOptions& options = {});

/// Request line for one round.
std::string request_json(const std::string& id, const context::AssembledContext& context);

/// One inserted or deleted line, addressed by placeholder.
struct LineChange {
  int placeholder = 0;
  bool del = false;
  std::string text;  // inserted text; empty for deletions

  friend bool operator==(const LineChange&, const LineChange&) = default;
};

/// Insertions (placeholder order, then insertion order) followed at each
/// placeholder by its deletion.
std::vector<LineChange> line_changes(const TargetEdit& edit);

struct RoundLog {
  int round = 0;
  std::vector<LineChange> suggested;
  std::vector<LineChange> accepted;
  /// The change performed by hand: a deletion together with the line that
  /// replaces it, or a single line.
  std::vector<LineChange> manual;
  metrics::EditCostReport manual_cost;
  std::string oracle_error;
};

struct SimulationOptions {
  int max_rounds = 6;
  metrics::KeystrokeParams keystrokes;
  context::ContextLimits limits;
  std::shared_ptr<const Tokenizer> tokenizer;
};

/// Progress of one episode: which of the ground truth's line changes have
/// been performed so far, by acceptance or by hand. Manual work proceeds by
/// change group (a deleted line with its replacement, or a single line).
class EpisodeState {
 public:
  EpisodeState(const miner::ProblemInstance& instance, metrics::KeystrokeParams keystrokes);

  const miner::ProblemInstance& instance() const { return *instance_; }
  const EditPlan& plan() const { return plan_; }
  const std::vector<bool>& done() const { return done_; }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }

  /// Line changes not yet performed.
  std::size_t remaining() const;
  /// Groups with at least one line change not yet performed.
  std::size_t remaining_groups() const;
  bool finished() const { return remaining() == 0; }

  /// The group holding the first line change not yet performed.
  std::size_t next_group() const;

  /// The query with every performed change inlined, and what is left.
  EditPlan::Split current() const;

  /// Current unit text.
  std::vector<std::string> text() const;

  /// Performs what is left of a group by hand and returns its cost; lines
  /// cost one per line change.
  metrics::EditCostReport perform_manually(std::size_t group);
  void accept(std::size_t change) { done_.at(change) = true; }

  /// Cost of doing every remaining group by hand, one at a time, top to
  /// bottom. Does not modify the state.
  std::vector<metrics::EditCostReport> residual_costs() const;

  metrics::EditCostReport ground_truth_cost() const;

 private:
  const miner::ProblemInstance* instance_;
  EditPlan plan_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<bool> done_;
  metrics::KeystrokeParams keystrokes_;
};

/// Queries the oracle once, accepts every suggested line change that matches
/// a remaining one exactly (trailing whitespace ignored) and, when nothing
/// matches, performs the first remaining change group by hand. Oracle failures and
/// undecodable outputs count as no suggestions.
RoundLog run_round(EpisodeState& state, OracleSession& session, const SimulationOptions& options, int round);

struct GainPercentages {
  double lines = 0;
  double levenshtein = 0;
  double keystrokes = 0;
};

/// Gain as a percentage of the ground-truth cost; 0 when that cost is 0.
GainPercentages percentages(const metrics::GainReport& gain, const metrics::EditCostReport& ground_truth);

struct SimulationResult {
  std::string project;
  std::string commit;
  std::string unit;

  int rounds = 0;
  bool completed = false;
  /// Change groups at the start and left at the round limit.
  std::size_t initial_changes = 0;
  std::size_t residual_changes = 0;
  std::size_t initial_lines = 0;
  std::vector<RoundLog> logs;

  metrics::EditCostReport ground_truth_cost;
  /// Manual costs in order, including residuals charged at the round limit.
  std::vector<metrics::EditCostReport> manual_costs;
  metrics::GainReport gains;
  /// Gains had the episode stopped after its first round with the rest done
  /// by hand.
  metrics::GainReport single_round_gains;
};

/// Rounds until every change is performed or the round limit is hit; the
/// residual is then charged as manual work.
SimulationResult run_episode(const miner::ProblemInstance& instance, Oracle& oracle, const SimulationOptions& options);

/// Episodes in parallel on up to `jobs` threads (further capped by the
/// oracle's concurrency); results are in instance order.
std::vector<SimulationResult> run_episodes(const std::vector<miner::ProblemInstance>& instances, Oracle& oracle,
                                           const SimulationOptions& options, std::size_t jobs);

struct Summary {
  std::size_t episodes = 0;
  double mean_rounds = 0;
  double completed_fraction = 0;
  GainPercentages gain;
  GainPercentages single_round_gain;
};

/// Means of per-episode percentages.
Summary aggregate(const std::vector<SimulationResult>& results);

/// Versioned report with every episode and the summary.
std::string report_json(const std::vector<SimulationResult>& results, const std::string& oracle, int max_rounds);

/// Human-readable summary table.
std::string summary_table(const Summary& summary);

}  // namespace coedit::sim
