// unicorn: command-line driver for the evaluation engine.
//
// Exit status 0 on success. On failure a single line "<category>: <message>"
// goes to stderr and the status is 1 (2 for command-line usage errors).

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "unicorn/core/error.hpp"
#include "unicorn/harness/baseline.hpp"
#include "unicorn/harness/synthetic.hpp"
#include "unicorn/orchestrator/engine.hpp"

namespace fs = std::filesystem;
using namespace unicorn;
using scoring::LeaderboardTarget;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

fs::path benchmark_root(const std::string& flag) {
  const auto root = flag.empty() ? env_or("UNICORN_BENCHMARK", "") : flag;
  if (root.empty()) fail("usage", "no benchmark given (--benchmark or UNICORN_BENCHMARK)");
  if (!fs::exists(root)) fail("io", "benchmark directory " + root + " does not exist");
  return root;
}

fs::path state_root(const std::string& flag, const std::string& benchmark_flag) {
  if (!flag.empty()) return flag;
  const auto env = env_or("UNICORN_STATE", "");
  if (!env.empty()) return env;
  const auto bench = benchmark_flag.empty() ? env_or("UNICORN_BENCHMARK", "") : benchmark_flag;
  if (bench.empty()) fail("usage", "no state directory (--state, UNICORN_STATE, or a benchmark)");
  return fs::path(bench) / "state";
}

adaptors::AdaptorSpec adaptor_from(const std::string& arg) {
  if (fs::exists(arg) && fs::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return adaptors::AdaptorSpec::parse(ss.str());
  }
  return adaptors::default_spec(adaptors::parse_strategy(arg));
}

void register_algorithms(const fs::path& benchmark) {
  int dim = 64;
  if (fs::exists(benchmark / "manifest.json")) dim = harness::load_manifest(benchmark).spec.feature_dim;
  harness::register_baseline(dim);
}

std::string table(const json& snapshot) {
  std::ostringstream out;
  out << "board " << snapshot.at("board").get<std::string>() << "\n";
  out << std::left << std::setw(6) << "rank" << std::setw(12) << "submission" << std::setw(16) << "team"
      << "aggregate\n";
  for (const auto& e : snapshot.at("entries")) {
    std::ostringstream score;
    score << std::fixed << std::setprecision(6) << e.at("aggregate").get<double>();
    out << std::left << std::setw(6) << e.at("rank").get<int>() << std::setw(12)
        << e.at("submission_id").get<std::string>() << std::setw(16) << e.at("team_id").get<std::string>()
        << score.str() << "\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UNICORN-style multi-task benchmark evaluation engine"};
  app.require_subcommand(1);

  harness::SyntheticBenchmarkSpec gen_spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a synthetic benchmark");
  gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--scale", gen_spec.scale, "validation/test case-count multiplier");
  gen->add_option("--feature-dim", gen_spec.feature_dim, "baseline representation width");
  gen->add_option("--out", gen_out, "output directory (default: UNICORN_BENCHMARK)");

  std::string bench_flag, state_flag, team, phase_text, algorithm = "baseline", adaptor_text = "knn";
  std::vector<std::string> target_texts;
  int k_override = 0;
  std::uint64_t adaptor_seed = 0;
  double divisor = 60.0;
  std::size_t check_cases = 5;
  bool serial = false;
  auto* run = app.add_subcommand("run", "submit and evaluate an algorithm");
  run->add_option("--benchmark", bench_flag, "benchmark root (default: UNICORN_BENCHMARK)");
  run->add_option("--state", state_flag, "challenge state directory");
  run->add_option("--team", team, "team id")->required();
  run->add_option("--phase", phase_text, "check | validation | test")->required();
  run->add_option("--target", target_texts, "leaderboard target, repeatable")->required();
  run->add_option("--algorithm", algorithm, "registered algorithm name");
  run->add_option("--adaptor", adaptor_text, "strategy name or adaptor spec file");
  run->add_option("--k", k_override, "override the adaptor's k");
  run->add_option("--adaptor-seed", adaptor_seed, "adaptor seed");
  run->add_option("--budget-divisor", divisor, "time limit divisor (seconds = minutes * 60 / divisor)");
  run->add_option("--check-cases", check_cases, "size of the check cohort");
  run->add_flag("--serial", serial, "evaluate tasks one at a time");

  std::string submission_id;
  auto* score = app.add_subcommand("score", "rescore a finished submission from its stored predictions");
  score->add_option("--benchmark", bench_flag, "benchmark root");
  score->add_option("--state", state_flag, "challenge state directory");
  score->add_option("--submission", submission_id, "submission id")->required();

  std::string board_target, board_phase, format = "table";
  auto* board = app.add_subcommand("leaderboard", "print a leaderboard");
  board->add_option("--benchmark", bench_flag, "benchmark root");
  board->add_option("--state", state_flag, "challenge state directory");
  board->add_option("--target", board_target, "leaderboard target")->required();
  board->add_option("--phase", board_phase, "validation | test (default: test when it has entries)");
  board->add_option("--format", format, "table | structured")->check(CLI::IsMember({"table", "structured"}));

  std::string workspace;
  auto* audit = app.add_subcommand("audit", "check a run workspace for leaked labels or splits");
  audit->add_option("--workspace", workspace, "run workspace")->required();
  audit->add_option("--benchmark", bench_flag, "benchmark root (enables content matching)");

  std::size_t instances = 100;
  std::uint64_t selftest_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "compare every metric with its brute-force oracle");
  selftest->add_option("--instances", instances, "random instances per metric");
  selftest->add_option("--seed", selftest_seed, "instance seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      const auto out = gen_out.empty() ? env_or("UNICORN_BENCHMARK", "") : gen_out;
      if (out.empty()) fail("usage", "no output directory (--out or UNICORN_BENCHMARK)");
      std::cout << dump_stable(harness::generate_benchmark(gen_spec, out).to_json());
    } else if (*run) {
      const auto bench = benchmark_root(bench_flag);
      register_algorithms(bench);
      std::vector<LeaderboardTarget> targets;
      for (const auto& t : target_texts) targets.push_back(LeaderboardTarget::parse(t));
      auto spec = adaptor_from(adaptor_text);
      if (k_override > 0) spec.hyperparams["k"] = k_override;
      spec.seed = adaptor_seed;
      orchestrator::RunOptions options;
      options.budget_divisor = divisor;
      options.check_cases = check_cases;
      options.parallel_tasks = !serial;
      orchestrator::Engine engine(state_root(state_flag, bench.string()));
      const auto outcome = engine.run(team, orchestrator::parse_phase(phase_text), targets, algorithm,
                                      BenchmarkLayout(bench), spec, options);
      std::cout << dump_stable(orchestrator::pipeline_result_json(outcome.submission, outcome.result));
      const auto status = outcome.submission.status;
      if (status == orchestrator::SubmissionStatus::timed_out) fail("timeout", outcome.submission.reason);
      if (status != orchestrator::SubmissionStatus::succeeded) fail("failed", outcome.submission.reason);
    } else if (*score) {
      const auto bench = benchmark_root(bench_flag);
      orchestrator::Engine engine(state_root(state_flag, bench.string()));
      std::cout << dump_stable(engine.score_submission(submission_id, BenchmarkLayout(bench)));
    } else if (*board) {
      orchestrator::Engine engine(state_root(state_flag, bench_flag));
      const auto target = LeaderboardTarget::parse(board_target);
      std::string name;
      if (!board_phase.empty()) {
        name = orchestrator::board_name(orchestrator::parse_phase(board_phase), target);
      } else {
        const auto test = orchestrator::board_name(orchestrator::Phase::test, target);
        const auto boards = engine.boards();
        name = std::find(boards.begin(), boards.end(), test) != boards.end()
                   ? test
                   : orchestrator::board_name(orchestrator::Phase::validation, target);
      }
      const auto snapshot = engine.leaderboard(name);
      std::cout << (format == "structured" ? dump_stable(snapshot) : table(snapshot));
    } else if (*audit) {
      if (!fs::is_directory(workspace)) fail("io", "workspace " + workspace + " does not exist");
      std::optional<BenchmarkLayout> layout;
      if (!bench_flag.empty()) layout.emplace(benchmark_root(bench_flag));
      const auto report = orchestrator::audit_information_flow(workspace, layout ? &*layout : nullptr);
      if (report.clean()) {
        std::cout << "clean\n";
      } else {
        for (const auto& v : report.violations) std::cout << v << "\n";
        fail("audit", std::to_string(report.violations.size()) + " violation(s)");
      }
    } else if (*selftest) {
      const auto checks = oracles::run_metric_oracles(selftest_seed, instances);
      oracles::print_checks(std::cout, checks);
      const auto bad = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed(); });
      if (bad) fail("selftest", std::to_string(bad) + " metric(s) disagree with their oracle");
    }
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
