#include <gtest/gtest.h>

#include <functional>
#include <random>

#include <nlohmann/json.hpp>

#include "coedit/error.hpp"
#include "coedit/simulation.hpp"
#include "test_support.hpp"

namespace coedit::sim {
namespace {

using L = LineStatus;

/// An instance whose query is the before side of `diff`, region the whole
/// unit and ground truth the rest of the diff.
miner::ProblemInstance instance_from_diff(const LineDiff& diff, std::vector<miner::PriorChange> prior = {}) {
  miner::ProblemInstance inst;
  inst.project = "p";
  inst.commit = "c";
  inst.file = "m.py";
  inst.unit = {"m", "f", python::UnitKind::Function};
  for (const auto& l : before_lines(diff)) inst.query.push_back({L::Empty, l});
  inst.region = EditRegion::whole(static_cast<int>(inst.query.size()));
  inst.ground_truth = edit_from_diff(diff);
  inst.prior_changes = std::move(prior);
  return inst;
}

/// `changes` single-line replacements, each followed by an unchanged line.
miner::ProblemInstance replacements(int changes) {
  LineDiff diff;
  for (int i = 0; i < changes; ++i) {
    diff.push_back({L::Add, "    v" + std::to_string(i) + " = new()"});
    diff.push_back({L::Empty, "    keep" + std::to_string(i) + "()"});
  }
  return instance_from_diff(diff);
}

class ScriptedOracle : public Oracle {
 public:
  using Script = std::function<std::string(const RoundInput&, int round)>;
  explicit ScriptedOracle(Script script) : script_(std::move(script)) {}

  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override {
    struct Session : OracleSession {
      Script script;
      int round = 0;
      std::string predict(const RoundInput& in) override { return script(in, ++round); }
    };
    auto s = std::make_unique<Session>();
    s->script = script_;
    return s;
  }
  std::string name() const override { return "scripted"; }

 private:
  Script script_;
};

TEST(RunRound, PerfectOracleAcceptsEverything) {
  const auto inst = replacements(3);
  EpisodeState state(inst, {});
  auto session = truth_oracle()->start_episode(inst);
  const auto log = run_round(state, *session, {}, 1);
  EXPECT_EQ(log.accepted.size(), 3u);
  EXPECT_TRUE(log.manual.empty());
  EXPECT_TRUE(state.finished());
}

TEST(RunRound, NoSuggestionMeansFirstChangeByHand) {
  const auto inst = replacements(3);
  EpisodeState state(inst, {});
  auto session = null_oracle()->start_episode(inst);
  const auto log = run_round(state, *session, {}, 1);
  EXPECT_TRUE(log.accepted.empty());
  EXPECT_EQ(log.manual, (std::vector<LineChange>{{1, false, "    v0 = new()"}}));
  EXPECT_EQ(log.manual_cost.lines, 1);
  EXPECT_EQ(log.manual_cost.levenshtein, static_cast<std::int64_t>(std::string("    v0 = new()\n").size()));
  EXPECT_EQ(state.remaining(), 2u);
}

TEST(RunRound, ManualReplacementIsOneChange) {
  const auto inst = instance_from_diff({{L::Empty, "def f():"},
                                        {L::Del, "    total = price"},
                                        {L::Add, "    total = price * qty"},
                                        {L::Empty, "    return total"}});
  EpisodeState state(inst, {});
  EXPECT_EQ(state.groups().size(), 1u);
  auto session = null_oracle()->start_episode(inst);
  const auto log = run_round(state, *session, {}, 1);
  EXPECT_EQ(log.manual.size(), 2u);
  EXPECT_EQ(log.manual_cost.lines, 2);
  EXPECT_EQ(log.manual_cost.levenshtein, 6);
  EXPECT_TRUE(state.finished());

  const auto r = run_episode(inst, *null_oracle(), {});
  EXPECT_EQ(r.rounds, 1);
  EXPECT_EQ(r.gains, metrics::GainReport{});
}

TEST(RunRound, OneMatchMeansNoManualEdit) {
  const auto inst = replacements(2);
  EpisodeState state(inst, {});
  ScriptedOracle oracle([](const RoundInput& in, int) {
    TargetEdit e;
    e.insert(2, "    v1 = new()   ");  // trailing whitespace is ignored
    e.insert(1, "    wrong()");
    return enc_output(e, in.context.region, in.context.statuses).render();
  });
  auto session = oracle.start_episode(inst);
  const auto log = run_round(state, *session, {}, 1);
  ASSERT_EQ(log.accepted.size(), 1u);
  EXPECT_EQ(log.accepted[0].text, "    v1 = new()");
  EXPECT_TRUE(log.manual.empty());
  EXPECT_EQ(state.remaining(), 1u);
  EXPECT_EQ(log.suggested.size(), 2u);
}

TEST(RunRound, UndecodableOutputCountsAsNoSuggestion) {
  const auto inst = replacements(2);
  EpisodeState state(inst, {});
  ScriptedOracle oracle([](const RoundInput&, int) -> std::string { return "<3><1><del>"; });
  auto session = oracle.start_episode(inst);
  const auto log = run_round(state, *session, {}, 1);
  EXPECT_FALSE(log.oracle_error.empty());
  EXPECT_TRUE(log.suggested.empty());
  EXPECT_FALSE(log.manual.empty());
}

TEST(RunEpisode, PerfectOracleFinishesInOneRound) {
  const auto r = run_episode(replacements(4), *truth_oracle(), {});
  EXPECT_EQ(r.rounds, 1);
  EXPECT_TRUE(r.completed);
  EXPECT_TRUE(r.manual_costs.empty());
  EXPECT_EQ(percentages(r.gains, r.ground_truth_cost).lines, 100.0);
  EXPECT_EQ(r.gains.keystrokes, r.ground_truth_cost.keystrokes);
}

TEST(RunEpisode, NullOracleDoesOneChangePerRound) {
  const auto r = run_episode(replacements(3), *null_oracle(), {});
  EXPECT_EQ(r.rounds, 3);
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.gains.lines, 0);
  EXPECT_EQ(r.manual_costs.size(), 3u);
}

TEST(RunEpisode, RoundLimitChargesResiduals) {
  const auto r = run_episode(replacements(10), *null_oracle(), {});
  EXPECT_EQ(r.rounds, 6);
  EXPECT_FALSE(r.completed);
  EXPECT_EQ(r.residual_changes, 4u);
  EXPECT_EQ(r.manual_costs.size(), 10u);
  EXPECT_EQ(r.gains.lines, 0);
  EXPECT_EQ(r.ground_truth_cost.lines, 10);
}

TEST(RunEpisode, SingleRoundModeChargesEverythingAfterRoundOne) {
  const auto inst = replacements(3);
  ScriptedOracle first_only([](const RoundInput& in, int round) -> std::string {
    if (round > 1) return enc_output(in.remaining_truth, in.context.region, in.context.statuses).render();
    return "";
  });
  const auto r = run_episode(inst, first_only, {});
  EXPECT_EQ(r.rounds, 2);
  EXPECT_EQ(r.gains.lines, 2);
  EXPECT_EQ(r.single_round_gains.lines, 0);

  const auto perfect = run_episode(inst, *truth_oracle(), {});
  EXPECT_EQ(perfect.single_round_gains, perfect.gains);
}

TEST(RunEpisode, EchoCopiesEarlierChanges) {
  // The earlier change renamed `price * qty`; the target repeats it and also
  // adds a novel line.
  const std::vector<miner::PriorChange> prior = {
      {"shop/cart.py", "Cart.total", miner::ChangeKind::Modified,
       {{L::Empty, "    def total(self):"},
        {L::Del, "        amount = price * qty"},
        {L::Add, "        amount = price * qty * (1 - self.rate)"},
        {L::Empty, "        return amount"}}}};
  const LineDiff diff = {{L::Empty, "def invoice(price, qty):"},
                         {L::Del, "    amount = price * qty"},
                         {L::Add, "    amount = price * qty * (1 - self.rate)"},
                         {L::Empty, "    log(amount)"},
                         {L::Add, "    audit(amount)"},
                         {L::Empty, "    return amount"}};
  const auto inst = instance_from_diff(diff, prior);
  const auto r = run_episode(inst, *echo_oracle(), {});
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.rounds, 2);
  ASSERT_EQ(r.logs.size(), 2u);
  EXPECT_EQ(r.logs[0].accepted.size(), 2u);
  EXPECT_FALSE(r.logs[1].manual.empty());
  const double lines = percentages(r.gains, r.ground_truth_cost).lines;
  EXPECT_GT(lines, 0.0);
  EXPECT_LT(lines, 100.0);

  // Without the earlier change there is nothing to copy.
  const auto alone = run_episode(instance_from_diff(diff), *echo_oracle(), {});
  EXPECT_EQ(alone.gains.lines, 0);
}

// ---- properties -------------------------------------------------------------------

/// Suggests a random subset of the remaining truth plus random noise.
class NoisyOracle : public Oracle {
 public:
  explicit NoisyOracle(std::uint64_t seed) : seed_(seed) {}
  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override {
    struct Session : OracleSession {
      std::mt19937_64 rng;
      std::string predict(const RoundInput& in) override {
        std::bernoulli_distribution coin(0.4);
        TargetEdit e;
        for (const auto& [k, entry] : in.remaining_truth.entries()) {
          for (const auto& ins : entry.insertions) {
            if (coin(rng)) e.insert(k, ins);
          }
          if (entry.del && coin(rng)) e.mark_delete(k);
        }
        if (coin(rng)) e.insert(1, "noise()");
        return enc_output(e, in.context.region, in.context.statuses).render();
      }
    };
    auto s = std::make_unique<Session>();
    s->rng.seed(seed_);
    return s;
  }
  std::string name() const override { return "noisy"; }

 private:
  std::uint64_t seed_;
};

TEST(EpisodeProperties, SoundMonotoneAndBounded) {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    const LineDiff unit = testing::random_unit(rng, 9);
    const EditRegion region = testing::random_region(rng, unit.size());
    miner::ProblemInstance inst;
    inst.query = unit;
    inst.region = region;
    inst.ground_truth = testing::random_edit(rng, unit, region);
    const auto expected = after_lines(inst.total());
    const std::size_t changes = inst.ground_truth.line_change_count();

    for (int limit : {2, 6, 100}) {
      SimulationOptions options;
      options.max_rounds = limit;
      NoisyOracle oracle(static_cast<std::uint64_t>(iter));
      EpisodeState state(inst, {});
      auto session = oracle.start_episode(inst);
      int rounds = 0;
      while (!state.finished() && rounds < limit) {
        const std::size_t before = state.remaining();
        const auto log = run_round(state, *session, options, ++rounds);
        ASSERT_LT(state.remaining(), before);
        ASSERT_EQ(log.accepted.size() + log.manual.size(), before - state.remaining());
        ASSERT_EQ(static_cast<std::int64_t>(log.manual.size()), log.manual_cost.lines);
      }
      ASSERT_LE(static_cast<std::size_t>(rounds), std::min<std::size_t>(static_cast<std::size_t>(limit), changes));
      state.residual_costs();
      if (state.finished()) ASSERT_EQ(state.text(), expected);

      const auto r = run_episode(inst, oracle, options);
      std::int64_t manual_lines = 0;
      for (const auto& c : r.manual_costs) manual_lines += c.lines;
      ASSERT_EQ(r.gains.lines + manual_lines, r.ground_truth_cost.lines);
      ASSERT_EQ(r.initial_lines, changes);
      ASSERT_LE(static_cast<std::size_t>(r.rounds), std::min<std::size_t>(static_cast<std::size_t>(limit), changes));
      ASSERT_EQ(r.completed, r.residual_changes == 0);

      const auto truth = run_episode(inst, *truth_oracle(), options);
      ASSERT_EQ(truth.rounds, changes == 0 ? 0 : 1);
      ASSERT_EQ(truth.gains.lines, truth.ground_truth_cost.lines);
      const auto null = run_episode(inst, *null_oracle(), options);
      ASSERT_EQ(null.gains.lines, 0);
      ASSERT_EQ(static_cast<std::size_t>(null.rounds), std::min<std::size_t>(static_cast<std::size_t>(limit), null.initial_changes));
    }
  }
}

TEST(EpisodeProperties, DeterministicAcrossRunsAndThreads) {
  std::vector<miner::ProblemInstance> instances;
  for (int i = 1; i <= 12; ++i) instances.push_back(replacements(i));
  NoisyOracle oracle(5);
  const auto one = report_json(run_episodes(instances, oracle, {}, 1), "noisy", 6);
  const auto again = report_json(run_episodes(instances, oracle, {}, 1), "noisy", 6);
  const auto parallel = report_json(run_episodes(instances, oracle, {}, 4), "noisy", 6);
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, parallel);
}

TEST(Aggregate, MeansOfPercentages) {
  std::vector<SimulationResult> results;
  results.push_back(run_episode(replacements(2), *truth_oracle(), {}));
  results.push_back(run_episode(replacements(2), *truth_oracle(), {}));
  auto s = aggregate(results);
  EXPECT_EQ(s.gain.lines, 100.0);
  EXPECT_EQ(s.mean_rounds, 1.0);
  EXPECT_EQ(s.completed_fraction, 1.0);

  results.push_back(run_episode(replacements(2), *null_oracle(), {}));
  results.push_back(run_episode(replacements(2), *null_oracle(), {}));
  s = aggregate(results);
  EXPECT_EQ(s.gain.lines, 50.0);
  EXPECT_EQ(s.mean_rounds, 1.5);

  const auto nulls = aggregate({results[2], results[3]});
  EXPECT_EQ(nulls.gain.lines, 0.0);
  EXPECT_LE(nulls.gain.keystrokes, 0.0);
  EXPECT_EQ(aggregate({}).episodes, 0u);
}

TEST(Report, VersionedSchema) {
  const auto j = nlohmann::json::parse(report_json({run_episode(replacements(1), *null_oracle(), {})}, "null", 6));
  EXPECT_EQ(j.at("schema"), "coedit-report/1");
  EXPECT_EQ(j.at("episodes").size(), 1u);
  EXPECT_EQ(j.at("summary").at("gain_percent").at("lines"), 0.0);
  EXPECT_TRUE(j.at("episodes")[0].at("log")[0].contains("manual"));
}

// ---- wire protocol ----------------------------------------------------------------

TEST(WireProtocol, RequestFields) {
  const auto inst = replacements(1);
  const auto ctx = context::assemble(inst, ByteFallbackTokenizer{});
  const auto j = nlohmann::json::parse(request_json("7", ctx));
  EXPECT_EQ(j.at("id"), "7");
  EXPECT_EQ(j.at("query"), "<1>    keep0()");
  EXPECT_EQ(j.at("region"), (nlohmann::json{{"a", 1}, {"n", 0}}));
  EXPECT_EQ(j.at("statuses"), (nlohmann::json{"empty"}));
  EXPECT_TRUE(j.at("references").empty());
}

std::string stub(const std::string& mode, int concurrency = 1) {
  return std::string("cmd:") + COEDIT_STUB_ORACLE + " " + mode + " " + std::to_string(concurrency);
}

TEST(WireProtocol, NullStubMatchesTheBuiltInNullOracle) {
  std::vector<miner::ProblemInstance> instances = {replacements(2), replacements(3)};
  auto oracle = make_oracle(stub("null"));
  EXPECT_EQ(oracle->max_concurrency(), 1u);
  const auto wire = run_episodes(instances, *oracle, {}, 4);
  const auto local = run_episodes(instances, *null_oracle(), {}, 1);
  EXPECT_EQ(report_json(wire, "x", 6), report_json(local, "x", 6));
}

TEST(WireProtocol, DecodedSuggestionsAreAccepted) {
  const auto inst = instance_from_diff({{L::Del, "gone()"}, {L::Empty, "kept()"}});
  auto oracle = make_oracle(stub("delete-first"));
  const auto r = run_episode(inst, *oracle, {});
  EXPECT_EQ(r.rounds, 1);
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.gains.lines, 1);
}

TEST(WireProtocol, ErrorsAndGarbageAreNoSuggestions) {
  for (const char* mode : {"error", "garbage"}) {
    auto oracle = make_oracle(stub(mode));
    const auto r = run_episode(replacements(2), *oracle, {});
    EXPECT_EQ(r.rounds, 2) << mode;
    EXPECT_EQ(r.gains.lines, 0) << mode;
    EXPECT_FALSE(r.logs[0].oracle_error.empty()) << mode;
  }
}

TEST(WireProtocol, TimeoutsAndCrashes) {
  OracleOptions options;
  options.timeout = std::chrono::milliseconds(200);
  auto silent = make_oracle(stub("silent"), options);
  auto r = run_episode(replacements(2), *silent, {});
  EXPECT_TRUE(r.completed);
  EXPECT_NE(r.logs[0].oracle_error.find("timed out"), std::string::npos);

  auto crash = make_oracle(stub("crash"), options);
  r = run_episode(replacements(3), *crash, {});
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.gains.lines, 0);
  EXPECT_FALSE(r.logs[2].oracle_error.empty());
}

TEST(WireProtocol, HandshakeIsChecked) {
  EXPECT_THROW(make_oracle(stub("bad-handshake")), OracleFailure);
  OracleOptions options;
  options.timeout = std::chrono::milliseconds(500);
  options.quiet = true;
  EXPECT_THROW(make_oracle("cmd:/nonexistent/oracle", options), OracleFailure);
  EXPECT_THROW(make_oracle("bogus"), Error);
}

TEST(WireProtocol, ConcurrentOutOfOrderResponses) {
  std::vector<miner::ProblemInstance> instances;
  for (int i = 1; i <= 16; ++i) instances.push_back(replacements(i % 5 + 1));
  auto oracle = make_oracle(stub("shuffle", 4));
  EXPECT_EQ(oracle->max_concurrency(), 4u);
  const auto wire = run_episodes(instances, *oracle, {}, 8);
  const auto local = run_episodes(instances, *null_oracle(), {}, 1);
  EXPECT_EQ(report_json(wire, "x", 6), report_json(local, "x", 6));
}

TEST(WireProtocol, TcpTransport) {
  Subprocess server({COEDIT_STUB_ORACLE, "tcp", "delete-first"});
  std::string port;
  ASSERT_TRUE(server.read_line(port));
  {
    auto oracle = make_oracle("tcp:127.0.0.1:" + port);
    const auto r = run_episode(instance_from_diff({{L::Del, "gone()"}, {L::Empty, "kept()"}}), *oracle, {});
    EXPECT_EQ(r.gains.lines, 1);
  }
  EXPECT_EQ(server.wait(), 0);
}

}  // namespace
}  // namespace coedit::sim
