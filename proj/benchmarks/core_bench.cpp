#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "coedit/assembler.hpp"
#include "coedit/encoding.hpp"
#include "coedit/line_diff.hpp"
#include "coedit/metrics.hpp"
#include "coedit/python/normalize.hpp"
#include "coedit/simulation.hpp"
#include "coedit/tokenizer.hpp"

namespace {

using namespace coedit;

std::string random_text(std::mt19937_64& rng, std::size_t n) {
  static constexpr char kAlphabet[] = "abcdefgh    ()=+.,_xyz";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  std::string s(n, ' ');
  for (auto& c : s) c = kAlphabet[pick(rng)];
  return s;
}

/// `n` lines of code-like text and a copy with roughly every fifth line edited.
std::pair<std::vector<std::string>, std::vector<std::string>> file_pair(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<std::string> before(n);
  for (std::size_t i = 0; i < n; ++i) before[i] = "    value_" + std::to_string(i % 37) + " = call(" + std::to_string(i) + ")";
  std::vector<std::string> after;
  std::uniform_int_distribution<int> op(0, 9);
  for (const auto& line : before) {
    switch (op(rng)) {
      case 0: break;
      case 1: after.push_back(line + "  # changed"); break;
      default: after.push_back(line);
    }
  }
  return {before, after};
}

void BM_LineDiff(benchmark::State& state) {
  const auto [before, after] = file_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(line_diff(before, after));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LineDiff)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Levenshtein(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_text(rng, static_cast<std::size_t>(state.range(0)));
  const auto b = random_text(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::levenshtein(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Levenshtein)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Keystrokes(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_text(rng, static_cast<std::size_t>(state.range(0)));
  auto b = a;
  for (std::size_t i = 0; i < b.size(); i += 9) b[i] = 'Q';
  for (auto _ : state) benchmark::DoNotOptimize(metrics::keystroke_cost(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Keystrokes)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Normalize(benchmark::State& state) {
  std::string source;
  for (int i = 0; i < state.range(0); ++i) {
    source += "def f" + std::to_string(i) + "(a, b=1, *args, **kw):\n    \"\"\"Doc.\"\"\"\n    x = g(b=2, a=a)  # note\n"
              "    return [y for y in x if y]\n\n";
  }
  for (auto _ : state) benchmark::DoNotOptimize(python::normalize_code(source));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * source.size()));
}
BENCHMARK(BM_Normalize)->Arg(1)->Arg(16)->Arg(256);

LineDiff replacement_diff(int changes) {
  LineDiff diff;
  for (int i = 0; i < changes; ++i) {
    diff.push_back({LineStatus::Del, "    old_" + std::to_string(i) + " = legacy(x)"});
    diff.push_back({LineStatus::Add, "    new_" + std::to_string(i) + " = modern(x)"});
    diff.push_back({LineStatus::Empty, "    keep_" + std::to_string(i) + "()"});
  }
  return diff;
}

miner::ProblemInstance instance(int changes, int prior) {
  const LineDiff diff = replacement_diff(changes);
  miner::ProblemInstance inst;
  inst.project = "p";
  inst.commit = "c";
  inst.file = "m.py";
  inst.unit = {"m", "f", python::UnitKind::Function};
  for (const auto& l : before_lines(diff)) inst.query.push_back({LineStatus::Empty, l});
  inst.region = EditRegion::whole(static_cast<int>(inst.query.size()));
  inst.ground_truth = edit_from_diff(diff);
  for (int i = 0; i < prior; ++i) inst.prior_changes.push_back({"m.py", "g" + std::to_string(i), {}, diff});
  return inst;
}

void BM_Assemble(benchmark::State& state) {
  const auto inst = instance(8, static_cast<int>(state.range(0)));
  const auto tokenizer = default_tokenizer();
  for (auto _ : state) benchmark::DoNotOptimize(context::assemble(inst, *tokenizer));
}
BENCHMARK(BM_Assemble)->Arg(0)->Arg(8)->Arg(64);

void BM_Episode(benchmark::State& state) {
  const auto inst = instance(static_cast<int>(state.range(0)), 4);
  const auto oracle = state.range(1) ? sim::truth_oracle() : sim::null_oracle();
  sim::SimulationOptions options;
  options.tokenizer = default_tokenizer();
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_episode(inst, *oracle, options));
}
BENCHMARK(BM_Episode)->ArgsProduct({{2, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
