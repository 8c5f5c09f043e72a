// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coedit/assembler.hpp"
#include "coedit/encoding.hpp"
#include "coedit/channel.hpp"
#include "coedit/error.hpp"
#include "coedit/line_diff.hpp"
#include "coedit/metrics.hpp"
#include "coedit/miner.hpp"
#include "coedit/python/import_graph.hpp"
#include "coedit/python/normalize.hpp"
#include "coedit/python/units.hpp"
#include "coedit/simulation.hpp"
#include "coedit/tokenizer.hpp"
#include "fixture_repo.hpp"
#include "oracles.hpp"
#include "python_corpus.hpp"
#include "test_support.hpp"

namespace {

using namespace coedit;
using L = LineStatus;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename... Parts>
void require(bool ok, const Parts&... parts) {
  if (ok) return;
  std::ostringstream s;
  (s << ... << parts);
  throw Failure(s.str());
}

struct Criterion {
  std::string name;
  double limit_seconds;  // 0: untimed
  std::function<std::string()> run;  // returns a short summary, throws Failure
};

// ---- encoding -----------------------------------------------------------------------

std::string encoding_round_trip() {
  std::mt19937_64 rng(1001);
  for (int iter = 0; iter < 1000; ++iter) {
    const LineDiff unit = testing::random_unit(rng, 10);
    const EditRegion region = testing::random_region(rng, unit.size());
    const TargetEdit edit = testing::random_edit(rng, unit, region);
    const auto statuses = statuses_of(unit);

    const auto output = enc_output(edit, region, statuses);
    const auto decoded = parse_output(TokenStream::parse(output.render()), statuses, region);
    require(decoded == edit, "case ", iter, ": parse_output(enc_output) differs\n", output.render());

    const auto input = parse_input(TokenStream::parse(enc_input(unit, region).render()));
    require(input.lines == unit && input.region == region, "case ", iter, ": parse_input(enc_input) differs");

    const LineDiff spliced = testing::substitute(enc_input(unit, region), output);
    const LineDiff applied = apply_edit(unit, region, edit);
    require(after_lines(spliced) == after_lines(applied), "case ", iter, ": substitution differs from apply_edit");

    auto before = testing::random_lines(rng, 10);
    auto after = testing::random_lines(rng, 10);
    before.push_back("#end");
    after.push_back("#end");
    LineDiff query;
    for (const auto& l : before) query.push_back({L::Empty, l});
    const auto rebuilt =
        apply_edit(query, EditRegion::whole(static_cast<int>(query.size())), edit_from_diff(line_diff(before, after)));
    require(after_lines(rebuilt) == after, "case ", iter, ": apply_edit does not rebuild the after side");
  }
  return "1000 cases";
}

// ---- metrics ------------------------------------------------------------------------

std::string keystroke_against_search() {
  const metrics::KeystrokeParams zero{4, 0};
  require(metrics::keystroke_cost("hello world", "hello", zero) == 6, "\"hello world\" -> \"hello\" != 6");
  require(metrics::keystroke_cost("", "ab", zero) == 2, "\"\" -> \"ab\" != 2");
  require(metrics::keystroke_cost("abcab", "abcab", zero) == 0, "x -> x != 0");

  testing::KeystrokeOracle oracle;
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 2);
  auto text = [&] {
    std::string s(static_cast<std::size_t>(len(rng)), 'a');
    for (auto& c : s) c = static_cast<char>('a' + ch(rng));
    return s;
  };
  std::vector<std::string> every = {""};
  for (std::size_t k = 0; k < every.size(); ++k) {
    if (every[k].size() == 4) continue;
    for (char c : {'a', 'b', 'c'}) every.push_back(every[k] + c);
  }
  for (const auto& a : every) {
    for (const auto& b : every) {
      for (int init : {0, 4}) {
        const auto got = metrics::keystroke_cost(a, b, {4, init});
        const auto want = oracle(a, b, 4, init);
        require(got == want, "'", a, "' -> '", b, "' init ", init, ": ", got, " != ", want);
      }
    }
  }

  const int pairs = 100000;
  for (int iter = 0; iter < pairs; ++iter) {
    const std::string a = text();
    const std::string b = text();
    for (int init : {0, 4}) {
      const auto got = metrics::keystroke_cost(a, b, {4, init});
      const auto want = oracle(a, b, 4, init);
      require(got == want, "'", a, "' -> '", b, "' init ", init, ": ", got, " != ", want);
    }
  }
  return "all " + std::to_string(every.size() * every.size()) + " pairs up to length 4 + 100000 sampled up to 8, init {0,4}; anchors 6/2/0";
}

std::string levenshtein_against_textbook() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<int> ch('a', 'e');
  auto text = [&] {
    std::string s(len(rng), 'a');
    for (auto& c : s) c = static_cast<char>(ch(rng));
    return s;
  };
  for (int iter = 0; iter < 10000; ++iter) {
    const std::string a = text();
    const std::string b = text();
    const auto got = metrics::levenshtein(a, b);
    const auto want = testing::textbook_levenshtein(a, b);
    require(got == want, "'", a, "' vs '", b, "': ", got, " != ", want);
  }
  return "10000 pairs";
}

// ---- normalization ------------------------------------------------------------------

std::string normalization_invariants() {
  const auto f1 = python::normalize_code("f(b=1,a=2)");
  const auto f2 = python::normalize_code("f(a=2,b=1)");
  require(f1.normalized && f2.normalized && f1.code == f2.code, "f(b=1,a=2) and f(a=2,b=1) differ: ", f1.code, " | ",
          f2.code);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::string a = testing::SnippetGenerator(seed, 1).snippet();
    const std::string b = testing::SnippetGenerator(seed, 2).snippet();
    const auto na = python::normalize_code(a);
    require(na.normalized, "snippet ", seed, " did not parse:\n", a);
    require(python::normalize_code(na.code).code == na.code, "snippet ", seed, " not idempotent:\n", a);
    require(python::normalize_code(b).code == na.code, "snippet ", seed, " depends on keyword order:\n", a, "\n--\n", b);
  }
  return "500 snippets + f(b=1,a=2)";
}

// ---- miner --------------------------------------------------------------------------

const miner::MiningResult& fixture_mining() {
  static const miner::MiningResult result =
      miner::mine_repository(testing::fixture_repository(), "fixture", miner::MineOptions{});
  return result;
}

std::vector<std::string> trim_trailing_blank(std::vector<std::string> lines) {
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string miner_ledger() {
  // Per-commit ledger documented in fixtures/make_fixture_repo.py.
  miner::MiningCounts ledger;
  ledger.projects = 1;
  ledger.commits = 9;
  ledger.used_commits = 5;
  ledger.modified_files = 6;
  ledger.modified_units = 7;
  ledger.modified_functions = 7;
  ledger.added_units = 2;
  ledger.deleted_units = 1;
  ledger.changed_lines = 19;
  ledger.skipped_files = 1;

  const auto& mined = fixture_mining();
  require(mined.counts == ledger, "mining counts differ from the ledger: ", miner::counts_to_json(mined.counts));
  const ByteFallbackTokenizer tokenizer;
  const auto stats = miner::dataset_stats(mined.instances, tokenizer, mined.counts);
  require(stats.counts == ledger, "dataset_stats counts differ from the ledger");
  require(stats.instances == 7, "expected 7 instances, got ", stats.instances);

  for (const auto& inst : mined.instances) {
    const auto shown =
        run_command({"git", "-C", testing::fixture_repository().string(), "show", inst.commit + ":" + inst.file});
    require(shown.status == 0, "git show failed for ", inst.file);
    const auto units = python::extract_units(shown.output, inst.unit.module);
    const auto it = std::find_if(units.begin(), units.end(), [&](const auto& u) { return u.id.name == inst.unit.name; });
    require(it != units.end(), inst.unit.name, " missing after ", inst.commit);
    require(trim_trailing_blank(after_lines(inst.total())) == it->lines, inst.unit.name, " does not reconstruct");
  }
  return "9 commits, 7 modified functions, 2 added, 1 deleted, 19 changed lines; 7 instances reconstruct";
}

std::string ordering() {
  const auto& mined = fixture_mining();
  std::map<std::string, std::vector<std::string>> by_commit;
  for (const auto& inst : mined.instances) by_commit[inst.commit].push_back(inst.unit.module + ":" + inst.unit.name);
  const std::vector<std::string> expected = {"shop.money:format_cents", "shop.cart:Cart.add", "shop.cart:describe"};
  require(std::any_of(by_commit.begin(), by_commit.end(), [&](const auto& c) { return c.second == expected; }),
          "multi-file commit not ordered imported-first, then top to bottom");

  std::mt19937_64 rng(4004);
  for (int iter = 0; iter < 500; ++iter) {
    python::ImportGraph g;
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("m" + std::to_string(i));
    std::shuffle(names.begin(), names.end(), rng);
    g.nodes.insert(names.begin(), names.end());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        if (std::bernoulli_distribution(0.3)(rng)) g.edges[names[static_cast<std::size_t>(i)]].insert(names[static_cast<std::size_t>(j)]);
      }
    }
    std::vector<miner::UnitChange> changes;
    for (const auto& module : names) {
      for (int k = std::uniform_int_distribution<int>(0, 3)(rng); k > 0; --k) {
        miner::UnitChange c;
        c.file = module + ".py";
        c.id = {module, "f" + std::to_string(changes.size()), python::UnitKind::Function};
        python::CodeUnit u;
        u.id = c.id;
        u.first_line = u.last_line = std::uniform_int_distribution<int>(1, 200)(rng);
        c.before = c.after = u;
        c.diff = {{L::Del, "x"}, {L::Add, "y"}};
        changes.push_back(std::move(c));
      }
    }
    std::shuffle(changes.begin(), changes.end(), rng);
    const auto ordered = miner::order_changes(changes, g);
    require(ordered.size() == changes.size(), "order_changes lost changes");
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      for (std::size_t j = i + 1; j < ordered.size(); ++j) {
        const auto& early = ordered[i];
        const auto& late = ordered[j];
        require(!g.has_edge(early.id.module, late.id.module), early.id.module, " imports ", late.id.module,
                " but its change comes first");
        if (early.file == late.file) {
          require(early.start_line() <= late.start_line(), "same-file changes out of line order in ", early.file);
        }
      }
    }
  }
  return "fixture commit + 500 random DAGs";
}

// ---- harness ------------------------------------------------------------------------

double lines_percent(const sim::SimulationResult& r) { return sim::percentages(r.gains, r.ground_truth_cost).lines; }

std::string harness_bounds() {
  std::vector<miner::ProblemInstance> episodes = fixture_mining().instances;
  std::mt19937_64 rng(5005);
  for (const auto& inst : fixture_mining().instances) {
    try {
      episodes.push_back(miner::synthesize_multiround(inst, rng));
    } catch (const NotEligible&) {
    }
  }
  sim::SimulationOptions options;
  options.tokenizer = default_tokenizer();

  const auto truth = sim::truth_oracle();
  const auto null = sim::null_oracle();
  for (const auto& inst : episodes) {
    const auto t = sim::run_episode(inst, *truth, options);
    require(t.rounds == 1 && lines_percent(t) == 100.0, inst.unit.name, ": truth oracle took ", t.rounds,
            " rounds, lines gain ", lines_percent(t), "%");
    const auto n = sim::run_episode(inst, *null, options);
    const auto expected_rounds = std::min<std::size_t>(6, n.initial_changes);
    require(n.gains.lines == 0 && static_cast<std::size_t>(n.rounds) == expected_rounds, inst.unit.name,
            ": null oracle took ", n.rounds, " rounds (expected ", expected_rounds, "), lines gain ", n.gains.lines);
  }

  const auto echo_repo = testing::scripted_repository("make_echo_repo");
  const auto echo_mined = miner::mine_repository(echo_repo, "echo", miner::MineOptions{});
  const auto designed = std::find_if(echo_mined.instances.begin(), echo_mined.instances.end(),
                                     [](const auto& i) { return i.unit.name == "invoice"; });
  require(designed != echo_mined.instances.end(), "echo fixture has no invoice instance");
  require(designed->prior_changes.size() == 1, "invoice should see the subtotal change");
  const auto echo = sim::echo_oracle();
  const auto e = sim::run_episode(*designed, *echo, options);
  require(lines_percent(e) > 0.0 && lines_percent(e) < 100.0, "echo oracle lines gain ", lines_percent(e),
          "% not strictly inside (0, 100)");

  auto all = episodes;
  all.push_back(*designed);
  for (const auto* oracle : {&truth, &null, &echo}) {
    const auto first = sim::report_json(sim::run_episodes(all, **oracle, options, 1), (*oracle)->name(), 6);
    const auto again = sim::report_json(sim::run_episodes(all, **oracle, options, 1), (*oracle)->name(), 6);
    const auto parallel = sim::report_json(sim::run_episodes(all, **oracle, options, 4), (*oracle)->name(), 6);
    require(first == again && first == parallel, (*oracle)->name(), " reports differ between runs");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu fixture episodes; echo lines gain %.1f%%; reports identical across runs",
                episodes.size(), lines_percent(e));
  return buf;
}

// ---- assembler ----------------------------------------------------------------------

LineDiff random_diff(std::mt19937_64& rng, std::size_t max_lines) {
  std::uniform_int_distribution<std::size_t> lines(1, max_lines);
  std::uniform_int_distribution<int> status(0, 2);
  std::uniform_int_distribution<int> width(0, 80);
  std::uniform_int_distribution<int> ch(32, 126);
  std::bernoulli_distribution huge(0.02);
  LineDiff d(lines(rng));
  for (auto& l : d) {
    l.status = static_cast<LineStatus>(status(rng));
    const int w = huge(rng) ? 5000 : width(rng);
    for (int i = 0; i < w; ++i) l.text.push_back(static_cast<char>(ch(rng)));
  }
  return d;
}

std::string assembler_caps() {
  const auto tokenizer = default_tokenizer();
  const context::ContextLimits limits;  // 1024 / 512 / 16384
  std::mt19937_64 rng(6006);
  std::uniform_int_distribution<int> changes(0, 60);
  std::size_t dropped = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<miner::PriorChange> prior;
    for (int k = changes(rng); k > 0; --k) {
      prior.push_back({"m.py", "u" + std::to_string(k), miner::ChangeKind::Modified, random_diff(rng, 120)});
    }
    python::SignatureDoc doc;
    for (int k = std::uniform_int_distribution<int>(0, 6)(rng); k > 0; --k) {
      doc.entries.push_back({"pkg.mod" + std::to_string(k % 3), "g" + std::to_string(k),
                             python::UsageSite::Kind::Function, "def g" + std::to_string(k) + "(a, b): ..."});
    }
    std::sort(doc.entries.begin(), doc.entries.end(),
              [](const auto& a, const auto& b) { return a.module < b.module; });
    LineDiff query = random_diff(rng, 400);
    const int a = std::uniform_int_distribution<int>(1, static_cast<int>(query.size()))(rng);
    const EditRegion region{a, std::min(4, static_cast<int>(query.size()) - a)};
    for (int k = 0; k <= region.n; ++k) {
      auto& t = query[static_cast<std::size_t>(a - 1 + k)].text;
      t = t.substr(0, 40);
    }

    const auto ctx = context::assemble(query, region, prior, doc, *tokenizer, limits);
    require(ctx.query.token_count <= 1024, "query block has ", ctx.query.token_count, " tokens");
    require(ctx.query.token_count == tokenizer->count(ctx.query.payload.render()), "query count is stale");
    require(ctx.reference_tokens() <= 16384, "references total ", ctx.reference_tokens(), " tokens");
    for (const auto& b : ctx.references) {
      require(b.token_count <= 512, b.descriptor(), " has ", b.token_count, " tokens");
      require(b.token_count == tokenizer->count(b.payload.render()), b.descriptor(), " count is stale");
    }
    dropped += ctx.dropped.size();

    const auto blocks = context::segment_references(prior, doc, *tokenizer, limits);
    std::set<std::string> expected;
    for (const auto& b : context::admit(blocks, limits.reference_budget).admitted) expected.insert(b.descriptor());
    auto shuffled = blocks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::set<std::string> got;
    for (const auto& b : context::admit(shuffled, limits.reference_budget).admitted) got.insert(b.descriptor());
    require(got == expected, "admitted set depends on reference order");
  }
  require(dropped > 0, "fuzz never exceeded the reference budget");
  return "200 fuzzed contexts, " + std::to_string(dropped) + " blocks dropped";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"encoding round trip", 30, encoding_round_trip},
      {"keystroke DP vs exhaustive search", 120, keystroke_against_search},
      {"levenshtein vs textbook DP", 10, levenshtein_against_textbook},
      {"normalization idempotence and keyword order", 0, normalization_invariants},
      {"miner fixture ledger and reconstruction", 60, miner_ledger},
      {"change ordering", 0, ordering},
      {"harness bounds and determinism", 60, harness_bounds},
      {"assembler caps and permutation invariance", 0, assembler_caps},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.limit_seconds > 0 && seconds > c.limit_seconds) {
      ok = false;
      detail += " (over the " + std::to_string(static_cast<int>(c.limit_seconds)) + " s limit)";
    }
    std::printf("%s  %-46s %7.2f s  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), seconds, detail.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
