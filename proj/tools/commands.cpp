#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "coedit/error.hpp"
#include "coedit/miner.hpp"
#include "coedit/simulation.hpp"
#include "coedit/tokenizer.hpp"

namespace coedit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
  if (limits.query_tokens == 0 || limits.block_tokens == 0 || limits.reference_budget == 0) {
    throw Error("token budgets must be positive");
  }
  if (max_rounds <= 0) throw Error("--max-rounds must be positive");
  if (timeout_ms <= 0) throw Error("--timeout-ms must be positive");
  if (keystrokes.cursor_jump_cost < 0 || keystrokes.init_cursor_dis < 0) throw Error("keystroke parameters must be >= 0");
}

namespace {

std::shared_ptr<const Tokenizer> tokenizer_for(const RunConfig& config) {
  if (!config.tokenizer.empty()) return BpeTokenizer::load(config.tokenizer);
  return default_tokenizer();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

std::vector<miner::ProblemInstance> load_instances(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  try {
    return miner::read_instances(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Generator for one instance, independent of processing order.
std::mt19937_64 instance_rng(std::uint64_t seed, const miner::ProblemInstance& inst) {
  const std::string key = inst.project + '\n' + inst.commit + '\n' + inst.file + '\n' + inst.unit.name;
  std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char c : key) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

bool is_repository(const fs::path& dir) {
  return fs::exists(dir / ".git") || (fs::exists(dir / "HEAD") && fs::is_directory(dir / "objects"));
}

void print_counts(const miner::MiningCounts& c, std::size_t instances) {
  std::printf("projects        %zu\n", c.projects);
  std::printf("commits         %zu (used %zu)\n", c.commits, c.used_commits);
  std::printf("modified files  %zu\n", c.modified_files);
  std::printf("modified units  %zu (functions %zu)\n", c.modified_units, c.modified_functions);
  std::printf("added units     %zu\n", c.added_units);
  std::printf("deleted units   %zu\n", c.deleted_units);
  std::printf("changed lines   %zu\n", c.changed_lines);
  std::printf("skipped files   %zu\n", c.skipped_files);
  std::printf("instances       %zu\n", instances);
}

}  // namespace

int mine(const RunConfig& config, const MineArgs& args) {
  const fs::path root(args.repos);
  if (!fs::is_directory(root)) throw DataError(args.repos + " is not a directory");
  std::vector<fs::path> repos;
  if (is_repository(root)) {
    repos.push_back(root);
  } else {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory() && is_repository(entry.path())) repos.push_back(entry.path());
    }
    std::sort(repos.begin(), repos.end());
  }
  if (repos.empty()) throw DataError("no git repositories under " + args.repos);

  std::vector<miner::MiningResult> results(repos.size());
  std::vector<std::string> failures(repos.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < repos.size(); i = next++) {
      const std::string project = fs::absolute(repos[i]).lexically_normal().filename().string();
      spdlog::info("mining {}", project);
      try {
        results[i] = miner::mine_repository(repos[i], project, {args.max_commits});
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(config.jobs, repos.size()); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  miner::MiningCounts counts;
  std::vector<miner::ProblemInstance> instances;
  for (std::size_t i = 0; i < repos.size(); ++i) {
    if (!failures[i].empty()) {
      spdlog::error("{}: {}", repos[i].string(), failures[i]);
      continue;
    }
    for (const auto& w : results[i].warnings) spdlog::warn("{}", w);
    counts += results[i].counts;
    for (auto& inst : results[i].instances) {
      if (args.multiround) {
        auto rng = instance_rng(config.seed, inst);
        try {
          instances.push_back(miner::synthesize_multiround(inst, rng));
        } catch (const NotEligible&) {
        }
      }
      instances.push_back(std::move(inst));
    }
  }

  auto out = open_output(args.out);
  miner::write_instances(out, instances);
  auto summary = open_output(args.out + ".summary.json");
  summary << miner::counts_to_json(counts) << '\n';
  print_counts(counts, instances.size());
  return std::all_of(failures.begin(), failures.end(), [](const auto& f) { return f.empty(); }) ? 0 : 2;
}

int derive_instances(const RunConfig& config, const DeriveArgs& args) {
  const auto instances = load_instances(args.in);
  auto out = open_output(args.out);
  std::size_t written = 0;
  if (args.kind == "multiround") {
    std::vector<miner::ProblemInstance> derived;
    for (const auto& inst : instances) {
      auto rng = instance_rng(config.seed, inst);
      try {
        derived.push_back(miner::synthesize_multiround(inst, rng));
      } catch (const NotEligible&) {
      }
    }
    miner::write_instances(out, derived);
    written = derived.size();
  } else if (args.kind == "completion") {
    for (const auto& p : miner::make_completion_instances(instances)) {
      out << miner::completion_to_json(p) << '\n';
      ++written;
    }
  } else {
    throw Error("unknown instance kind '" + args.kind + "'");
  }
  spdlog::info("{} of {} instances written", written, instances.size());
  std::printf("%zu\n", written);
  return 0;
}

int encode(const RunConfig& config, const EncodeArgs& args) {
  const auto instances = load_instances(args.instances);
  const auto tokenizer = tokenizer_for(config);
  std::size_t first = 0;
  std::size_t last = instances.size();
  if (args.index) {
    if (*args.index >= instances.size()) throw DataError("instance index out of range");
    first = *args.index;
    last = first + 1;
  }
  for (std::size_t i = first; i < last; ++i) {
    const auto& inst = instances[i];
    const auto ctx = context::assemble(inst, *tokenizer, config.limits);
    const std::string target = enc_output(inst.ground_truth, inst.region, statuses_of(inst.query)).render();
    if (args.json) {
      json j = json::parse(sim::request_json(std::to_string(i), ctx));
      j["target"] = target;
      j["dropped"] = ctx.dropped;
      std::cout << j.dump() << '\n';
      continue;
    }
    std::cout << "=== instance " << i << ": " << inst.project << " " << inst.commit << " " << inst.file << " "
              << inst.unit.name << "\n";
    std::cout << "--- query (" << ctx.query.token_count << " tokens" << (ctx.query.truncated ? ", truncated" : "")
              << ")\n"
              << ctx.query.payload.render() << "\n";
    std::cout << "--- target (" << tokenizer->count(target) << " tokens)\n" << target << "\n";
    for (const auto& b : ctx.references) {
      std::cout << "--- reference " << b.descriptor() << " (" << b.token_count << " tokens"
                << (b.truncated ? ", truncated" : "") << ")\n"
                << b.payload.render() << "\n";
    }
    for (const auto& d : ctx.dropped) std::cout << "--- dropped " << d << "\n";
  }
  return 0;
}

int simulate(const RunConfig& config, const SimulateArgs& args) {
  auto instances = load_instances(args.instances);
  if (args.limit && *args.limit < instances.size()) instances.resize(*args.limit);
  sim::OracleOptions oracle_options;
  oracle_options.timeout = std::chrono::milliseconds(config.timeout_ms);
  const auto oracle = sim::make_oracle(args.oracle, oracle_options);

  sim::SimulationOptions options;
  options.max_rounds = config.max_rounds;
  options.keystrokes = config.keystrokes;
  options.limits = config.limits;
  options.tokenizer = tokenizer_for(config);
  spdlog::info("simulating {} episodes with oracle {}", instances.size(), oracle->name());
  const auto results = sim::run_episodes(instances, *oracle, options, config.jobs);

  for (const auto& r : results) {
    for (const auto& log : r.logs) {
      if (!log.oracle_error.empty()) spdlog::warn("{} round {}: {}", r.unit, log.round, log.oracle_error);
    }
  }
  const std::string report = sim::report_json(results, args.oracle, config.max_rounds);
  if (args.out.empty()) {
    std::cout << report << '\n';
    return 0;
  }
  auto out = open_output(args.out);
  out << report << '\n';
  std::cout << sim::summary_table(sim::aggregate(results));
  return 0;
}

int stats(const RunConfig& config, const StatsArgs& args) {
  const auto instances = load_instances(args.instances);
  std::optional<miner::MiningCounts> counts;
  std::string summary = args.summary;
  if (summary.empty() && fs::exists(args.instances + ".summary.json")) summary = args.instances + ".summary.json";
  if (!summary.empty()) counts = miner::counts_from_json(read_file(summary));

  miner::StatsCaps caps;
  caps.query = config.limits.query_tokens;
  caps.prev_change = config.limits.reference_budget;
  const auto s = miner::dataset_stats(instances, *tokenizer_for(config), counts, caps);
  const std::string text = miner::stats_to_json(s);
  if (args.out.empty()) {
    std::cout << text << '\n';
    return 0;
  }
  auto out = open_output(args.out);
  out << text << '\n';
  print_counts(s.counts, s.instances);
  std::printf("\n%-12s %8s %8s %8s %8s\n", "tokens", "median", "mean", "max", ">=cap");
  const std::pair<const char*, const miner::TokenDistribution*> rows[] = {{"query", &s.query_tokens},
                                                                          {"output", &s.output_tokens},
                                                                          {"prev change", &s.prev_change_tokens},
                                                                          {"signature", &s.signature_tokens}};
  for (const auto& [name, d] : rows) {
    std::printf("%-12s %8.1f %8.1f %8zu %7.1f%%\n", name, d->median, d->mean, d->max, 100.0 * d->fraction_at_cap);
  }
  return 0;
}

int metric(const RunConfig& config, const MetricArgs& args) {
  const std::string before = read_file(args.before);
  const std::string after = read_file(args.after);
  std::int64_t value = 0;
  if (args.kind == "lines") {
    value = metrics::lines_cost(line_diff(split_lines(before), split_lines(after)));
  } else if (args.kind == "lev") {
    value = metrics::levenshtein(join_lines(split_lines(before)), join_lines(split_lines(after)));
  } else if (args.kind == "keys") {
    value = metrics::keystroke_cost(join_lines(split_lines(before)), join_lines(split_lines(after)), config.keystrokes);
  } else {
    throw Error("unknown metric kind '" + args.kind + "'");
  }
  std::printf("%lld\n", static_cast<long long>(value));
  return 0;
}

}  // namespace coedit::cli
