#include "coedit/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <future>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "coedit/error.hpp"

namespace coedit::sim {

using nlohmann::json;

namespace {

const ByteFallbackTokenizer kFallbackTokenizer;

std::string_view status_name(LineStatus s) {
  switch (s) {
    case LineStatus::Add: return "add";
    case LineStatus::Del: return "del";
    case LineStatus::Empty: break;
  }
  return "empty";
}

// ---- built-in oracles ---------------------------------------------------------------

class NullSession : public OracleSession {
 public:
  std::string predict(const RoundInput&) override { return {}; }
};

class NullOracle : public Oracle {
 public:
  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override {
    return std::make_unique<NullSession>();
  }
  std::string name() const override { return "null"; }
};

class TruthSession : public OracleSession {
 public:
  std::string predict(const RoundInput& in) override {
    return enc_output(in.remaining_truth, in.context.region, in.context.statuses).render();
  }
};

class TruthOracle : public Oracle {
 public:
  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override {
    return std::make_unique<TruthSession>();
  }
  std::string name() const override { return "truth"; }
};

std::string leading_space(std::string_view s) { return std::string(s.substr(0, s.find_first_not_of(" \t"))); }

std::string strip(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  return rstrip(s.substr(begin));
}

struct Replacement {
  std::string indent;
  std::vector<std::string> lines;
};

/// Deleted line (stripped) to the lines that replaced it. Within a hunk the
/// i-th deletion pairs with the i-th addition; extra additions go with the
/// last deletion.
std::map<std::string, Replacement> replacements(const std::vector<LineDiff>& changes) {
  std::map<std::string, Replacement> out;
  for (const auto& diff : changes) {
    for (std::size_t i = 0; i < diff.size();) {
      if (diff[i].status == LineStatus::Empty) {
        ++i;
        continue;
      }
      std::vector<const StatusedLine*> dels;
      std::vector<std::string> adds;
      while (i < diff.size() && diff[i].status != LineStatus::Empty) {
        if (diff[i].status == LineStatus::Del) {
          dels.push_back(&diff[i]);
        } else {
          adds.push_back(diff[i].text);
        }
        ++i;
      }
      for (std::size_t d = 0; d < dels.size(); ++d) {
        const std::string key = strip(dels[d]->text);
        if (key.empty() || out.count(key)) continue;
        Replacement r{leading_space(dels[d]->text), {}};
        if (d < adds.size()) {
          const std::size_t end = d + 1 == dels.size() ? adds.size() : d + 1;
          r.lines.assign(adds.begin() + static_cast<std::ptrdiff_t>(d), adds.begin() + static_cast<std::ptrdiff_t>(end));
        }
        out.emplace(key, std::move(r));
      }
    }
  }
  return out;
}

class EchoSession : public OracleSession {
 public:
  std::string predict(const RoundInput& in) override {
    std::vector<LineDiff> changes;
    for (const auto& block : in.context.references) {
      if (block.source.rfind("change:", 0) != 0) continue;
      try {
        changes.push_back(parse_input(block.payload).lines);
      } catch (const Error&) {
        // A truncated block may not decode; skip it.
      }
    }
    const auto table = replacements(changes);
    const auto query = parse_input(in.context.query.payload);
    const EditRegion& region = in.context.region;
    TargetEdit edit;
    for (int k = 1; k <= region.placeholder_count(); ++k) {
      const auto& line = query.lines[static_cast<std::size_t>(region.a + k - 2)];
      if (line.status != LineStatus::Empty) continue;
      const auto it = table.find(strip(line.text));
      if (it == table.end()) continue;
      const std::string indent = leading_space(line.text);
      const int target = k < region.placeholder_count() ? k + 1 : k;
      for (const auto& added : it->second.lines) {
        if (added.rfind(it->second.indent, 0) == 0) {
          edit.insert(target, indent + added.substr(it->second.indent.size()));
        } else {
          edit.insert(target, added);
        }
      }
      edit.mark_delete(k);
    }
    return enc_output(edit, region, in.context.statuses).render();
  }
};

class EchoOracle : public Oracle {
 public:
  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override {
    return std::make_unique<EchoSession>();
  }
  std::string name() const override { return "echo"; }
};

// ---- wire oracle --------------------------------------------------------------------

class WireOracle : public Oracle {
 public:
  WireOracle(std::unique_ptr<LineChannel> channel, std::string name, OracleOptions options)
      : channel_(std::move(channel)), name_(std::move(name)), options_(options) {
    auto handshake = handshake_.get_future();
    reader_ = std::thread([this] { read_loop(); });
    if (handshake.wait_for(options_.timeout) != std::future_status::ready) {
      shutdown();
      throw OracleFailure(name_ + ": no handshake");
    }
    std::string line;
    try {
      line = handshake.get();
      const json j = json::parse(line);
      if (j.value("proto", std::string{}) != kOracleProtocol) throw OracleFailure(name_ + ": unsupported protocol");
      const auto n = j.value("max_concurrency", 1);
      max_concurrency_ = n < 1 ? 1 : static_cast<std::size_t>(n);
    } catch (const json::exception&) {
      shutdown();
      throw OracleFailure(name_ + ": malformed handshake: " + line);
    } catch (...) {
      shutdown();
      throw;
    }
  }

  ~WireOracle() override { shutdown(); }

  std::unique_ptr<OracleSession> start_episode(const miner::ProblemInstance&) override;
  std::size_t max_concurrency() const override { return max_concurrency_; }
  std::string name() const override { return name_; }

  std::string call(const context::AssembledContext& ctx) {
    {
      std::unique_lock lock(mu_);
      slots_cv_.wait(lock, [&] { return in_flight_ < max_concurrency_ || closed_; });
      if (closed_) throw OracleFailure(name_ + ": connection closed");
      ++in_flight_;
    }
    struct Release {
      WireOracle* self;
      ~Release() {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
        self->slots_cv_.notify_one();
      }
    } release{this};

    const std::string id = std::to_string(next_id_++);
    std::future<json> response;
    {
      std::lock_guard lock(mu_);
      if (closed_) throw OracleFailure(name_ + ": connection closed");
      response = pending_[id].get_future();
    }
    try {
      std::lock_guard lock(write_mu_);
      channel_->write_line(request_json(id, ctx));
    } catch (const Error& e) {
      forget(id);
      throw OracleFailure(name_ + ": " + e.what());
    }
    if (response.wait_for(options_.timeout) != std::future_status::ready) {
      forget(id);
      throw OracleFailure(name_ + ": request " + id + " timed out");
    }
    const json j = response.get();  // rethrows OracleFailure when the channel closed
    if (j.contains("error")) throw OracleFailure(name_ + ": " + j["error"].dump());
    if (!j.contains("output") || !j["output"].is_string()) throw OracleFailure(name_ + ": response without output");
    return j["output"].get<std::string>();
  }

 private:
  void forget(const std::string& id) {
    std::lock_guard lock(mu_);
    pending_.erase(id);
  }

  void read_loop() {
    std::string line;
    bool first = true;
    while (channel_->read_line(line)) {
      if (first) {
        first = false;
        handshake_.set_value(line);
        continue;
      }
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        continue;
      }
      std::string id;
      if (j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      if (j.contains("id") && j["id"].is_number_integer()) id = std::to_string(j["id"].get<long long>());
      std::lock_guard lock(mu_);
      const auto it = pending_.find(id);
      if (it == pending_.end()) continue;
      it->second.set_value(std::move(j));
      pending_.erase(it);
    }
    if (first) handshake_.set_exception(std::make_exception_ptr(OracleFailure(name_ + ": closed before handshake")));
    std::lock_guard lock(mu_);
    closed_ = true;
    for (auto& [id, promise] : pending_) {
      promise.set_exception(std::make_exception_ptr(OracleFailure(name_ + ": connection closed")));
    }
    pending_.clear();
    slots_cv_.notify_all();
    closed_cv_.notify_all();
  }

  void shutdown() {
    if (!reader_.joinable()) return;
    try {
      channel_->close_write();
    } catch (const Error&) {
    }
    {
      std::unique_lock lock(mu_);
      closed_cv_.wait_for(lock, std::chrono::seconds(2), [&] { return closed_; });
    }
    if (auto* process = dynamic_cast<Subprocess*>(channel_.get())) {
      process->kill();
    } else if (auto* tcp = dynamic_cast<TcpChannel*>(channel_.get())) {
      tcp->shutdown();
    }
    reader_.join();
    if (auto* process = dynamic_cast<Subprocess*>(channel_.get())) process->wait();
  }

  std::unique_ptr<LineChannel> channel_;
  std::string name_;
  OracleOptions options_;
  std::size_t max_concurrency_ = 1;

  std::thread reader_;
  std::promise<std::string> handshake_;
  std::mutex write_mu_;
  std::mutex mu_;
  std::condition_variable slots_cv_;
  std::condition_variable closed_cv_;
  std::unordered_map<std::string, std::promise<json>> pending_;
  std::size_t in_flight_ = 0;
  bool closed_ = false;
  std::atomic<std::uint64_t> next_id_{1};
};

class WireSession : public OracleSession {
 public:
  explicit WireSession(WireOracle& oracle) : oracle_(oracle) {}
  std::string predict(const RoundInput& in) override { return oracle_.call(in.context); }

 private:
  WireOracle& oracle_;
};

std::unique_ptr<OracleSession> WireOracle::start_episode(const miner::ProblemInstance&) {
  return std::make_unique<WireSession>(*this);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// ---- matching -----------------------------------------------------------------------

/// Positions in `truth` matched by `predicted`: per placeholder, a longest
/// common subsequence of the insertions plus the deletion when both have it.
std::vector<std::size_t> match_changes(const std::vector<LineChange>& truth, const std::vector<LineChange>& predicted) {
  std::map<int, std::vector<std::size_t>> truth_ins;
  std::map<int, std::size_t> truth_del;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].del) {
      truth_del[truth[i].placeholder] = i;
    } else {
      truth_ins[truth[i].placeholder].push_back(i);
    }
  }
  std::map<int, std::vector<std::string>> pred_ins;
  std::map<int, bool> pred_del;
  for (const auto& p : predicted) {
    if (p.del) {
      pred_del[p.placeholder] = true;
    } else {
      pred_ins[p.placeholder].push_back(rstrip(p.text));
    }
  }

  std::vector<std::size_t> matched;
  for (const auto& [k, positions] : truth_ins) {
    const auto it = pred_ins.find(k);
    if (it == pred_ins.end()) continue;
    const auto& p = it->second;
    const std::size_t n = positions.size();
    const std::size_t m = p.size();
    std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t a = n; a-- > 0;) {
      for (std::size_t b = m; b-- > 0;) {
        lcs[a][b] = rstrip(truth[positions[a]].text) == p[b] ? lcs[a + 1][b + 1] + 1
                                                             : std::max(lcs[a + 1][b], lcs[a][b + 1]);
      }
    }
    for (std::size_t a = 0, b = 0; a < n && b < m;) {
      if (rstrip(truth[positions[a]].text) == p[b]) {
        matched.push_back(positions[a]);
        ++a;
        ++b;
      } else if (lcs[a + 1][b] >= lcs[a][b + 1]) {
        ++a;
      } else {
        ++b;
      }
    }
  }
  for (const auto& [k, position] : truth_del) {
    if (pred_del.count(k)) matched.push_back(position);
  }
  std::sort(matched.begin(), matched.end());
  return matched;
}

json cost_json(const metrics::EditCostReport& c) {
  return {{"lines", c.lines}, {"levenshtein", c.levenshtein}, {"keystrokes", c.keystrokes}};
}

json gain_json(const metrics::GainReport& g) {
  return {{"lines", g.lines}, {"levenshtein", g.levenshtein}, {"keystrokes", g.keystrokes}};
}

json pct_json(const GainPercentages& p) {
  return {{"lines", p.lines}, {"levenshtein", p.levenshtein}, {"keystrokes", p.keystrokes}};
}

json change_json(const LineChange& c) {
  if (c.del) return {{"placeholder", c.placeholder}, {"del", true}};
  return {{"placeholder", c.placeholder}, {"add", c.text}};
}

}  // namespace

std::shared_ptr<Oracle> null_oracle() { return std::make_shared<NullOracle>(); }
std::shared_ptr<Oracle> truth_oracle() { return std::make_shared<TruthOracle>(); }
std::shared_ptr<Oracle> echo_oracle() { return std::make_shared<EchoOracle>(); }

std::shared_ptr<Oracle> wire_oracle(std::unique_ptr<LineChannel> channel, std::string name,
                                    const OracleOptions& options) {
  return std::make_shared<WireOracle>(std::move(channel), std::move(name), options);
}

std::shared_ptr<Oracle> make_oracle(const std::string& kind, const OracleOptions& options) {
  if (kind == "null") return null_oracle();
  if (kind == "truth") return truth_oracle();
  if (kind == "echo") return echo_oracle();
  if (kind.rfind("cmd:", 0) == 0) {
    const auto argv = split_words(kind.substr(4));
    if (argv.empty()) throw Error("cmd: oracle needs a command");
    return wire_oracle(std::make_unique<Subprocess>(argv, "", options.quiet), kind, options);
  }
  if (kind.rfind("tcp:", 0) == 0) {
    return wire_oracle(std::make_unique<TcpChannel>(kind.substr(4)), kind, options);
  }
  throw Error("unknown oracle '" + kind + "' (expected null, truth, echo, cmd:<argv> or tcp:<host:port>)");
}

std::string request_json(const std::string& id, const context::AssembledContext& ctx) {
  json refs = json::array();
  for (const auto& b : ctx.references) refs.push_back(b.payload.render());
  json statuses = json::array();
  for (auto s : ctx.statuses) statuses.push_back(status_name(s));
  json j = {{"id", id},
            {"query", ctx.query.payload.render()},
            {"references", std::move(refs)},
            {"region", {{"a", ctx.region.a}, {"n", ctx.region.n}}},
            {"statuses", std::move(statuses)}};
  return j.dump();
}

std::vector<LineChange> line_changes(const TargetEdit& edit) {
  std::vector<LineChange> out;
  for (const auto& [k, e] : edit.entries()) {
    for (const auto& ins : e.insertions) out.push_back({k, false, ins});
    if (e.del) out.push_back({k, true, {}});
  }
  return out;
}

// ---- episode state ------------------------------------------------------------------

EpisodeState::EpisodeState(const miner::ProblemInstance& instance, metrics::KeystrokeParams keystrokes)
    : instance_(&instance),
      plan_(instance.query, instance.region, instance.ground_truth),
      groups_(miner::change_groups(plan_)),
      done_(plan_.change_count(), false),
      keystrokes_(keystrokes) {}

std::size_t EpisodeState::remaining() const { return static_cast<std::size_t>(std::count(done_.begin(), done_.end(), false)); }

std::size_t EpisodeState::remaining_groups() const {
  return static_cast<std::size_t>(std::count_if(groups_.begin(), groups_.end(), [&](const auto& g) {
    return std::any_of(g.begin(), g.end(), [&](std::size_t c) { return !done_[c]; });
  }));
}

std::size_t EpisodeState::next_group() const {
  const auto first = static_cast<std::size_t>(std::find(done_.begin(), done_.end(), false) - done_.begin());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (std::find(groups_[g].begin(), groups_[g].end(), first) != groups_[g].end()) return g;
  }
  throw Error("no change left");
}

EditPlan::Split EpisodeState::current() const { return plan_.split(done_); }

std::vector<std::string> EpisodeState::text() const { return after_lines(current().query); }

namespace {

metrics::EditCostReport manual_cost(const std::vector<std::string>& before, const std::vector<std::string>& after,
                                    std::size_t lines, const metrics::KeystrokeParams& keystrokes) {
  auto cost = metrics::edit_cost(before, after, keystrokes);
  cost.lines = static_cast<std::int64_t>(lines);
  return cost;
}

}  // namespace

metrics::EditCostReport EpisodeState::perform_manually(std::size_t group) {
  const auto before = text();
  std::size_t lines = 0;
  for (std::size_t c : groups_.at(group)) {
    if (done_[c]) continue;
    done_[c] = true;
    ++lines;
  }
  return manual_cost(before, text(), lines, keystrokes_);
}

std::vector<metrics::EditCostReport> EpisodeState::residual_costs() const {
  EpisodeState copy = *this;
  std::vector<metrics::EditCostReport> out;
  while (!copy.finished()) out.push_back(copy.perform_manually(copy.next_group()));
  return out;
}

metrics::EditCostReport EpisodeState::ground_truth_cost() const {
  auto cost = metrics::edit_cost(after_lines(instance_->query), after_lines(plan_.total()), keystrokes_);
  cost.lines = static_cast<std::int64_t>(plan_.change_count());
  return cost;
}

RoundLog run_round(EpisodeState& state, OracleSession& session, const SimulationOptions& options, int round) {
  RoundLog log;
  log.round = round;
  const auto split = state.current();
  std::vector<std::size_t> remaining;
  for (std::size_t c = 0; c < state.done().size(); ++c) {
    if (!state.done()[c]) remaining.push_back(c);
  }
  const auto truth = line_changes(split.target);
  if (truth.size() != remaining.size()) throw Error("episode bookkeeping out of sync");

  const Tokenizer& tokenizer = options.tokenizer ? *options.tokenizer : kFallbackTokenizer;
  try {
    const auto ctx = context::assemble(split.query, split.region, state.instance().prior_changes,
                                       state.instance().signature_doc, tokenizer, options.limits);
    const std::string output = session.predict({ctx, split.target});
    const TargetEdit predicted = parse_output(TokenStream::parse(output), ctx.statuses, ctx.region);
    log.suggested = line_changes(predicted);
  } catch (const Error& e) {
    log.oracle_error = e.what();
    log.suggested.clear();
  }

  const auto matched = match_changes(truth, log.suggested);
  for (std::size_t position : matched) {
    log.accepted.push_back(truth[position]);
    state.accept(remaining[position]);
  }
  if (matched.empty() && !remaining.empty()) {
    const std::size_t group = state.next_group();
    for (std::size_t c : state.groups()[group]) {
      const auto at = std::find(remaining.begin(), remaining.end(), c);
      if (at != remaining.end()) log.manual.push_back(truth[static_cast<std::size_t>(at - remaining.begin())]);
    }
    log.manual_cost = state.perform_manually(group);
  }
  return log;
}

GainPercentages percentages(const metrics::GainReport& gain, const metrics::EditCostReport& gt) {
  auto pct = [](std::int64_t g, std::int64_t c) { return c == 0 ? 0.0 : 100.0 * static_cast<double>(g) / static_cast<double>(c); };
  return {pct(gain.lines, gt.lines), pct(gain.levenshtein, gt.levenshtein), pct(gain.keystrokes, gt.keystrokes)};
}

SimulationResult run_episode(const miner::ProblemInstance& instance, Oracle& oracle, const SimulationOptions& options) {
  SimulationResult result;
  result.project = instance.project;
  result.commit = instance.commit;
  result.unit = instance.unit.module + ":" + instance.unit.name;

  EpisodeState state(instance, options.keystrokes);
  result.initial_changes = state.remaining_groups();
  result.initial_lines = state.remaining();
  result.ground_truth_cost = state.ground_truth_cost();

  const auto session = oracle.start_episode(instance);
  std::vector<metrics::EditCostReport> single_round;
  while (!state.finished() && result.rounds < options.max_rounds) {
    ++result.rounds;
    auto log = run_round(state, *session, options, result.rounds);
    if (!log.manual.empty()) result.manual_costs.push_back(log.manual_cost);
    if (result.rounds == 1) {
      single_round = result.manual_costs;
      const auto rest = state.residual_costs();
      single_round.insert(single_round.end(), rest.begin(), rest.end());
    }
    result.logs.push_back(std::move(log));
  }
  result.residual_changes = state.remaining_groups();
  const auto residual = state.residual_costs();
  result.manual_costs.insert(result.manual_costs.end(), residual.begin(), residual.end());
  result.completed = result.residual_changes == 0;
  result.gains = metrics::total_gain(result.ground_truth_cost, result.manual_costs);
  result.single_round_gains = metrics::total_gain(result.ground_truth_cost, single_round);
  return result;
}

std::vector<SimulationResult> run_episodes(const std::vector<miner::ProblemInstance>& instances, Oracle& oracle,
                                           const SimulationOptions& options, std::size_t jobs) {
  std::vector<SimulationResult> results(instances.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min({jobs == 0 ? std::size_t{1} : jobs, oracle.max_concurrency(), instances.size()}));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        results[i] = run_episode(instances[i], oracle, options);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

Summary aggregate(const std::vector<SimulationResult>& results) {
  Summary s;
  s.episodes = results.size();
  if (results.empty()) return s;
  for (const auto& r : results) {
    s.mean_rounds += r.rounds;
    s.completed_fraction += r.completed ? 1 : 0;
    const auto g = percentages(r.gains, r.ground_truth_cost);
    const auto g1 = percentages(r.single_round_gains, r.ground_truth_cost);
    s.gain.lines += g.lines;
    s.gain.levenshtein += g.levenshtein;
    s.gain.keystrokes += g.keystrokes;
    s.single_round_gain.lines += g1.lines;
    s.single_round_gain.levenshtein += g1.levenshtein;
    s.single_round_gain.keystrokes += g1.keystrokes;
  }
  const double n = static_cast<double>(results.size());
  s.mean_rounds /= n;
  s.completed_fraction /= n;
  for (auto* p : {&s.gain, &s.single_round_gain}) {
    p->lines /= n;
    p->levenshtein /= n;
    p->keystrokes /= n;
  }
  return s;
}

std::string report_json(const std::vector<SimulationResult>& results, const std::string& oracle, int max_rounds) {
  json episodes = json::array();
  for (const auto& r : results) {
    metrics::EditCostReport manual;
    for (const auto& c : r.manual_costs) manual += c;
    json rounds = json::array();
    for (const auto& log : r.logs) {
      json accepted = json::array();
      for (const auto& c : log.accepted) accepted.push_back(change_json(c));
      json entry = {{"round", log.round}, {"suggested", log.suggested.size()}, {"accepted", std::move(accepted)}};
      if (!log.manual.empty()) {
        json manual = json::array();
        for (const auto& c : log.manual) manual.push_back(change_json(c));
        entry["manual"] = std::move(manual);
        entry["manual_cost"] = cost_json(log.manual_cost);
      }
      if (!log.oracle_error.empty()) entry["oracle_error"] = log.oracle_error;
      rounds.push_back(std::move(entry));
    }
    episodes.push_back({{"project", r.project},
                        {"commit", r.commit},
                        {"unit", r.unit},
                        {"rounds", r.rounds},
                        {"completed", r.completed},
                        {"initial_changes", r.initial_changes},
                        {"initial_lines", r.initial_lines},
                        {"residual_changes", r.residual_changes},
                        {"ground_truth_cost", cost_json(r.ground_truth_cost)},
                        {"manual_cost", cost_json(manual)},
                        {"gain", gain_json(r.gains)},
                        {"gain_percent", pct_json(percentages(r.gains, r.ground_truth_cost))},
                        {"single_round_gain", gain_json(r.single_round_gains)},
                        {"log", std::move(rounds)}});
  }
  const auto s = aggregate(results);
  json j = {{"schema", kReportSchema},
            {"oracle", oracle},
            {"max_rounds", max_rounds},
            {"summary",
             {{"episodes", s.episodes},
              {"mean_rounds", s.mean_rounds},
              {"completed_fraction", s.completed_fraction},
              {"gain_percent", pct_json(s.gain)}}},
            {"single_round", {{"gain_percent", pct_json(s.single_round_gain)}}},
            {"episodes", std::move(episodes)}};
  return j.dump(2);
}

std::string summary_table(const Summary& s) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer,
                "episodes     %zu\n"
                "mean rounds  %.3f\n"
                "completed    %.1f%%\n"
                "             %10s %12s %12s\n"
                "multi-round  %9.2f%% %11.2f%% %11.2f%%\n"
                "single-round %9.2f%% %11.2f%% %11.2f%%\n",
                s.episodes, s.mean_rounds, 100.0 * s.completed_fraction, "Lines", "Levenshtein", "Keystrokes",
                s.gain.lines, s.gain.levenshtein, s.gain.keystrokes, s.single_round_gain.lines,
                s.single_round_gain.levenshtein, s.single_round_gain.keystrokes);
  return buffer;
}

}  // namespace coedit::sim
