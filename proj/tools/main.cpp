#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "coedit/error.hpp"
#include "commands.hpp"

namespace {

using coedit::cli::RunConfig;

void add_shared_options(CLI::App& app, RunConfig& config, int& verbosity) {
  app.add_option("--seed", config.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs,-j", config.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tokenizer", config.tokenizer,
                 "BPE vocabulary (vocab.json + merges.txt); defaults to $COEDIT_TOKENIZER, then the built-in tokenizer");
  app.add_option("--query-tokens", config.limits.query_tokens, "Query block limit")->capture_default_str();
  app.add_option("--block-tokens", config.limits.block_tokens, "Reference block limit")->capture_default_str();
  app.add_option("--reference-budget", config.limits.reference_budget, "Total reference tokens")->capture_default_str();
  app.add_option("--jump", config.keystrokes.cursor_jump_cost, "Keystroke cursor jump cost")->capture_default_str();
  app.add_option("--init", config.keystrokes.init_cursor_dis, "Keystroke initial cursor distance")->capture_default_str();
  app.add_option("--max-rounds", config.max_rounds, "Simulation round limit")->capture_default_str();
  app.add_option("--timeout-ms", config.timeout_ms, "Oracle request timeout")->capture_default_str();
  app.add_flag("-v,--verbose", verbosity, "More log output (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  config.jobs = std::max(1u, std::thread::hardware_concurrency());
  int verbosity = 0;

  CLI::App app{"Line-diff edit encoding, commit mining and multi-round edit simulation for Python projects.", "coedit"};
  app.set_config("--config", "", "TOML file with option values (keys are long option names)");
  app.require_subcommand(1);
  app.fallthrough();
  add_shared_options(app, config, verbosity);

  coedit::cli::MineArgs mine;
  auto* mine_cmd = app.add_subcommand("mine", "Mine problem instances from git repositories");
  mine_cmd->add_option("--repos", mine.repos, "A repository, or a directory of repositories")->required();
  mine_cmd->add_option("--out", mine.out, "Instance file (JSON lines); counts go to <out>.summary.json")->required();
  mine_cmd->add_option("--max-commits", mine.max_commits, "Commits per project")->capture_default_str();
  mine_cmd->add_flag("--multiround", mine.multiround, "Also emit a multi-round variant of every eligible instance");

  coedit::cli::DeriveArgs derive;
  auto* derive_cmd = app.add_subcommand("instances", "Derive multi-round or completion instances");
  derive_cmd->add_option("--in", derive.in, "Mined instance file")->required();
  derive_cmd->add_option("--out", derive.out, "Output file")->required();
  derive_cmd->add_option("--kind", derive.kind, "multiround or completion")
      ->check(CLI::IsMember({"multiround", "completion"}))
      ->capture_default_str();

  coedit::cli::EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "Show the encoded query, target and reference blocks");
  encode_cmd->add_option("--instances", encode.instances, "Instance file")->required();
  encode_cmd->add_option("--index", encode.index, "Only this instance (0-based)");
  encode_cmd->add_flag("--json", encode.json, "One oracle request per line, with the target added");

  coedit::cli::SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run multi-round editing episodes against an oracle");
  simulate_cmd->add_option("--instances", simulate.instances, "Instance file")->required();
  simulate_cmd->add_option("--oracle", simulate.oracle, "null, truth, echo, cmd:<argv> or tcp:<host:port>")
      ->capture_default_str();
  simulate_cmd->add_option("--out", simulate.out, "Report file; without it the report goes to standard output");
  simulate_cmd->add_option("--limit", simulate.limit, "Only the first N instances");

  coedit::cli::StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset counts and token distributions");
  stats_cmd->add_option("--instances", stats.instances, "Instance file")->required();
  stats_cmd->add_option("--summary", stats.summary, "Mining counts (default: <instances>.summary.json if present)");
  stats_cmd->add_option("--out", stats.out, "Statistics file; without it the JSON goes to standard output");

  coedit::cli::MetricArgs metric;
  auto* metric_cmd = app.add_subcommand("metric", "Editing cost between two files");
  metric_cmd->add_option("--kind", metric.kind, "lines, lev or keys")
      ->required()
      ->check(CLI::IsMember({"lines", "lev", "keys"}));
  metric_cmd->add_option("--before", metric.before, "File before the edit")->required()->check(CLI::ExistingFile);
  metric_cmd->add_option("--after", metric.after, "File after the edit")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "coedit: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  auto logger = spdlog::stderr_color_mt("coedit");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
  spdlog::set_level(verbosity >= 2 ? spdlog::level::debug : verbosity == 1 ? spdlog::level::info : spdlog::level::warn);

  try {
    config.validate();
    if (*mine_cmd) return coedit::cli::mine(config, mine);
    if (*derive_cmd) return coedit::cli::derive_instances(config, derive);
    if (*encode_cmd) return coedit::cli::encode(config, encode);
    if (*simulate_cmd) return coedit::cli::simulate(config, simulate);
    if (*stats_cmd) return coedit::cli::stats(config, stats);
    if (*metric_cmd) return coedit::cli::metric(config, metric);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 1;
}
