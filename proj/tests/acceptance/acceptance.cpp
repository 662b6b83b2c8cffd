// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "unicorn/adaptors/adaptors.hpp"
#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"
#include "unicorn/core/registry.hpp"
#include "unicorn/harness/baseline.hpp"
#include "unicorn/harness/synthetic.hpp"
#include "unicorn/metrics/caption.hpp"
#include "unicorn/metrics/classification.hpp"
#include "unicorn/metrics/detection.hpp"
#include "unicorn/metrics/redaction.hpp"
#include "unicorn/metrics/segmentation.hpp"
#include "unicorn/metrics/survival.hpp"
#include "unicorn/orchestrator/engine.hpp"
#include "unicorn/scoring/scoring.hpp"

#ifndef UNICORN_CLI
#error "UNICORN_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;
using namespace unicorn;
using orchestrator::Phase;
using orchestrator::SubmissionStatus;
using scoring::LeaderboardTarget;
using Kind = LeaderboardTarget::Kind;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Scratch {
  fs::path path;
  explicit Scratch(const std::string& tag) {
    path = fs::temp_directory_path() / ("unicorn-accept-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// ------------------------------------------------------------------ 1

void normalization(Outcome& o) {
  const std::map<int, double> expected_ref{{2, 0.5},  {3, 0.5},  {13, 0.5},     {14, 0.5},    {16, 0.5},
                                           {6, 0.25}, {9, 0.2548}, {17, 0.7580}, {18, 0.7668}};
  const auto& reg = load_task_registry();
  for (const auto& t : reg.all()) {
    const double want = expected_ref.count(t.task_id) ? expected_ref.at(t.task_id) : 0.0;
    o.expect(t.norm.s_ref == want, "s_ref of task " + std::to_string(t.task_id));
    o.expect(t.norm.s_max == 1.0, "s_max of task " + std::to_string(t.task_id));
    for (double s : {0.0, 0.3, want, 0.9, 1.0}) {
      const double got = scoring::normalize_task_score(t, s).normalized;
      o.expect(std::fabs(got - (s - want) / (1.0 - want)) <= 1e-12, "t_n of task " + std::to_string(t.task_id));
    }
  }

  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> raw(20);
    std::map<int, double> by_id;
    for (int i = 0; i < 20; ++i) by_id[i + 1] = raw[std::size_t(i)] = u(rng);
    const double lib = scoring::unicorn_score(by_id, LeaderboardTarget::named(Kind::all_tasks)).value;
    worst = std::max(worst, std::fabs(lib - oracles::unicorn_all_tasks(raw)));
  }
  const double secs = seconds_since(t0);
  o.expect(worst <= 1e-12, "aggregate differs from the 20-term transcription");
  o.expect(secs < 1.0, "1,000 aggregates took longer than 1 s");
  o.note << "9 non-zero references, 1000 vectors, max |diff| " << worst << ", " << std::fixed << std::setprecision(3)
         << secs << " s";
}

// ------------------------------------------------------------------ 2

void oracle_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  const auto checks = oracles::run_metric_oracles(1, 150, 1e-9);
  const double secs = seconds_since(t0);
  std::size_t instances = 0;
  for (const auto& c : checks) {
    o.expect(c.passed() && c.instances >= 100, c.metric + " disagrees with its oracle");
    instances += c.instances;
  }
  o.expect(checks.size() >= 16, "missing metric families");
  o.expect(secs < 60.0, "oracle suite took longer than 60 s");
  o.note << checks.size() << " metrics, " << instances << " instances, tol 1e-9, " << std::fixed
         << std::setprecision(2) << secs << " s";
}

// ------------------------------------------------------------------ 3

void counting_rules(Outcome& o) {
  const auto& reg = load_task_registry();
  for (int id : {5, 8}) {
    const metrics::HitRadiusRule rule = metrics::HitRadiusRule::fixed(reg.at(id).params.hit_radius);
    for (std::size_t n = 2; n <= 6; ++n) {
      // n predictions on one cell: 1 tp, 0 fp, 0 fn
      PointSet many;
      for (std::size_t i = 0; i < n; ++i) many.points.push_back({{20.0 + double(i), 20.0}, 1.0});
      LesionRefs one{{{{20.0, 20.0}, 4.0}}};
      const auto a = metrics::match_points(many, one, rule);
      o.expect(a.tp == 1 && a.fp == 0 && a.fn == 0, "several predictions on one reference");
      // one prediction covering n cells: 1 tp, n-1 fn
      PointSet single{{{{20.0, 20.0}, 1.0}}, std::nullopt};
      LesionRefs cluster;
      for (std::size_t i = 0; i < n; ++i) cluster.lesions.push_back({{20.0 + double(i), 21.0}, 4.0});
      const auto b = metrics::match_points(single, cluster, rule);
      o.expect(b.tp == 1 && b.fp == 0 && b.fn == n - 1, "one prediction covering several references");
    }
  }
  // CPM is 0 when nothing is detected
  std::vector<PointSet> far(3);
  std::vector<LesionRefs> refs(3);
  for (std::size_t c = 0; c < 3; ++c) {
    far[c].points.push_back({{100.0, 100.0, 100.0}, 0.9});
    refs[c].lesions.push_back({{5.0, 5.0, 5.0}, 6.0});
  }
  o.expect(metrics::froc_cpm(far, refs).cpm == 0.0, "CPM without true positives");
  o.expect(metrics::froc_cpm(std::vector<PointSet>(3), refs).cpm == 0.0, "CPM without candidates");
  o.note << "T5/T8 radius " << reg.at(5).params.hit_radius << ", N = 2..6, CPM zero rule";
}

// ------------------------------------------------------------------ 4

void composite_weights(Outcome& o) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double sp = u(rng), lae = u(rng), sae = u(rng);
    o.expect(metrics::uls_composite(sp, lae, sae) == 0.888 * sp + 0.056 * lae + 0.056 * sae, "ULS composite");
  }
  std::uniform_int_distribution<int> pos(0, 60), len(1, 8), tag(0, 2);
  const char* tags[] = {"person", "date", "location"};
  for (int i = 0; i < 1000; ++i) {
    EntitySpans p, r;
    for (std::size_t at = std::size_t(len(rng)); at + 8 < 80; at += 10 + std::size_t(len(rng)))
      r.spans.push_back({at, at + std::size_t(len(rng)), tags[tag(rng)]});
    for (int k = 0; k < 4; ++k) {
      const auto t = std::size_t(pos(rng));
      p.spans.push_back({t, t + std::size_t(len(rng)), tags[tag(rng)]});
    }
    const auto sc = metrics::score_redaction(metrics::redaction_counts(p, r, 80));
    o.expect(sc.blended == 0.7 * sc.strict + 0.3 * sc.binary, "blended F1");
    o.expect(metrics::blended_redaction_f1(p, r, 80) == sc.blended, "blended F1 entry point");
  }
  o.note << "1000 random ULS triples, 1000 random span sets, exact equality";
}

// ------------------------------------------------------------------ 5

void identity_anchors(Outcome& o) {
  const std::vector<std::string> captions{"invasive ductal carcinoma with dense stroma",
                                          "benign prostatic tissue without atypia", "necrosis"};
  std::vector<metrics::Tokens> docs;
  for (const auto& c : captions) docs.push_back(metrics::tokenize(c));
  const metrics::CiderCorpus corpus(docs);
  const metrics::HashedNgramEmbedder emb;
  for (const auto& c : captions) {
    const auto s = metrics::caption_score(c, {c}, corpus, emb);
    for (double v : {s.bleu4, s.rouge_l, s.cider, s.meteor, s.embedding, s.composite})
      o.expect(std::fabs(v - 1.0) <= 1e-12, "caption identity for '" + c + "'");
  }

  Grid<int> m({2, 3, 3}, {1, 1, 1});
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = int(i % 4);
  o.expect(metrics::dice(m, m) == 1.0, "binary Dice");
  o.expect(metrics::dice(m, m, metrics::DiceMode::multiclass_mean({1, 2, 3})) == 1.0, "multiclass Dice");
  o.expect(metrics::instance_averaged_dice(m, m) == 1.0, "instance Dice");
  PointSet p{{{{1, 2}, 1.0}, {{9, 9}, 1.0}}, std::nullopt};
  LesionRefs l{{{{1, 2}, 4.0}, {{9, 9}, 4.0}}};
  o.expect(metrics::detection_f1(metrics::match_points(p, l, metrics::HitRadiusRule::half_diameter())) == 1.0, "F1");
  const std::vector<int> lab{0, 3, 1, 2, 2, 4};
  o.expect(metrics::cohen_kappa(lab, lab, metrics::KappaWeighting::none, 5) == 1.0, "unweighted kappa");
  o.expect(metrics::cohen_kappa(lab, lab, metrics::KappaWeighting::quadratic, 5) == 1.0, "quadratic kappa");
  const std::vector<double> risk{4, 3, 2, 1}, time{1, 2, 3, 4};
  o.expect(metrics::concordance_index_censored(risk, {true, true, false, true}, time) == 1.0, "c-index");

  const auto& reg = load_task_registry();
  std::map<int, double> at_ref, perfect;
  for (const auto& t : reg.all()) {
    at_ref[t.task_id] = t.norm.s_ref;
    perfect[t.task_id] = t.norm.s_max;
  }
  const auto all = LeaderboardTarget::named(Kind::all_tasks);
  o.expect(scoring::unicorn_score(at_ref, all).value == 0.0, "all-at-reference aggregate");
  o.expect(scoring::unicorn_score(perfect, all).value == 1.0, "all-perfect aggregate");
  o.note << "caption (5 parts + composite), Dice x3, F1, kappa x2, c-index, aggregates 0 and 1";
}

// ------------------------------------------------------------------ 6

// Independent model of the phase and quota rules, tracking only what the
// rules need.
struct ShadowLedger {
  std::set<std::pair<std::string, LeaderboardTarget>> checked;
  std::map<std::pair<std::string, LeaderboardTarget>, int> live_validation;
  std::map<std::string, int> live_test;

  static int quota(const LeaderboardTarget& t) {
    return t.kind == Kind::task_specific ? 3 : t.kind == Kind::all_tasks ? 1 : 2;
  }
  bool accepts(const std::string& team, Phase ph, const std::vector<LeaderboardTarget>& ts) const {
    if (ph == Phase::check) return true;
    for (const auto& t : ts)
      if (!checked.count({team, t})) return false;
    if (ph == Phase::validation) {
      const auto it = live_validation.find({team, ts[0]});
      return (it == live_validation.end() ? 0 : it->second) < quota(ts[0]);
    }
    bool all = false;
    for (const auto& t : ts) {
      if (t.kind == Kind::task_specific) return false;
      all = all || t.kind == Kind::all_tasks;
    }
    if (all && ts.size() > 1) return false;
    const auto it = live_test.find(team);
    return it == live_test.end() || it->second == 0;
  }
};

void quota_state_machine(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  const std::vector<LeaderboardTarget> targets{
      LeaderboardTarget::task(1),  LeaderboardTarget::task(7),  LeaderboardTarget::task(19),
      LeaderboardTarget::named(Kind::pathology_vision), LeaderboardTarget::named(Kind::radiology_vision),
      LeaderboardTarget::named(Kind::language),         LeaderboardTarget::named(Kind::all_tasks)};
  const std::vector<std::string> teams{"alpha", "beta", "gamma"};

  std::size_t submissions = 0, accepted = 0, mismatches = 0, violations = 0;
  for (int seq = 0; seq < 20; ++seq) {
    orchestrator::QuotaLedger ledger;
    ShadowLedger shadow;
    std::vector<orchestrator::Submission> in_flight;
    std::uint64_t clock = 0;
    for (int step = 0; step < 500; ++step) {
      if (!in_flight.empty() && pick(3) == 0) {
        const auto k = std::size_t(pick(int(in_flight.size())));
        const auto s = in_flight[k];
        in_flight.erase(in_flight.begin() + long(k));
        const int roll = pick(10);
        const auto st = roll < 6 ? SubmissionStatus::succeeded : roll < 8 ? SubmissionStatus::failed : SubmissionStatus::timed_out;
        ledger.complete(s.submission_id, st);
        const bool ok = st == SubmissionStatus::succeeded;
        if (s.phase == Phase::check && ok) shadow.checked.insert({s.team_id, s.targets[0]});
        if (s.phase == Phase::validation && !ok) --shadow.live_validation[{s.team_id, s.targets[0]}];
        if (s.phase == Phase::test && !ok) --shadow.live_test[s.team_id];
      }
      const auto& team = teams[std::size_t(pick(3))];
      const int r = pick(10);
      const Phase ph = r < 4 ? Phase::check : r < 8 ? Phase::validation : Phase::test;
      std::vector<LeaderboardTarget> ts{targets[std::size_t(pick(int(targets.size())))]};
      if (ph == Phase::test && pick(3) == 0) {
        const auto extra = targets[std::size_t(3 + pick(4))];
        if (extra != ts[0]) ts.push_back(extra);
      }
      std::sort(ts.begin(), ts.end());
      const bool expect = shadow.accepts(team, ph, ts);
      const auto d = ledger.submit(team, ph, ts, "algo", ++clock);
      ++submissions;
      if (d.accepted != expect) ++mismatches;
      if (!d.accepted) continue;
      ++accepted;
      if (ph == Phase::validation) ++shadow.live_validation[{team, ts[0]}];
      if (ph == Phase::test) ++shadow.live_test[team];
      in_flight.push_back(d.submission);

      // invariants re-derived from the shadow state
      for (const auto& [k, n] : shadow.live_validation)
        if (n > ShadowLedger::quota(k.second) || ledger.validation_used(k.first, k.second) != n) ++violations;
      for (const auto& [t, n] : shadow.live_test)
        if (n > 1 || ledger.test_slot_taken(t) != (n == 1)) ++violations;
      if (step % 50 == 49) violations += ledger.invariant_violations().size();
    }
    violations += ledger.invariant_violations().size();
  }

  // quoted cases
  {
    orchestrator::QuotaLedger l;
    std::uint64_t ts = 0;
    const auto t7 = LeaderboardTarget::task(7), lang = LeaderboardTarget::named(Kind::language),
               all = LeaderboardTarget::named(Kind::all_tasks);
    for (int i = 0; i < 25; ++i) o.expect(l.submit("q", Phase::check, {t7}, "a", ++ts).accepted, "unlimited check");
    for (const auto& t : {t7, lang, all}) {
      const auto c = l.submit("q", Phase::check, {t}, "a", ++ts);
      l.complete(c.submission.submission_id, SubmissionStatus::succeeded);
    }
    for (int i = 0; i < 3; ++i) {
      const auto d = l.submit("q", Phase::validation, {t7}, "a", ++ts);
      o.expect(d.accepted, "validation within quota");
      l.complete(d.submission.submission_id, SubmissionStatus::succeeded);
    }
    const auto fourth = l.submit("q", Phase::validation, {t7}, "a", ++ts);
    o.expect(!fourth.accepted && fourth.reason.find("quota 3 exhausted") != std::string::npos, "4th validation");
    const auto first_test = l.submit("q", Phase::test, {lang}, "a", ++ts);
    l.complete(first_test.submission.submission_id, SubmissionStatus::succeeded);
    o.expect(!l.submit("q", Phase::test, {all}, "a", ++ts).accepted, "all_tasks test after language test");
  }

  const double secs = seconds_since(t0);
  o.expect(mismatches == 0, std::to_string(mismatches) + " decisions differ from the rule model");
  o.expect(violations == 0, std::to_string(violations) + " invariant violations");
  o.expect(submissions == 10000, "submission count");
  o.expect(secs < 10.0, "state machine check took longer than 10 s");
  o.note << submissions << " submissions (" << accepted << " accepted), " << mismatches << " decision mismatches, "
         << violations << " violations, " << std::fixed << std::setprecision(2) << secs << " s";
}

// ------------------------------------------------------------------ 7

void isolation(Outcome& o) {
  Scratch dir("iso");
  harness::register_baseline();
  int clean = 0, detected = 0, runs = 0;
  const auto all = LeaderboardTarget::named(Kind::all_tasks);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    harness::SyntheticBenchmarkSpec spec;
    spec.seed = seed;
    spec.scale = 0.05;
    const auto root = dir.path / ("bench" + std::to_string(seed));
    harness::generate_benchmark(spec, root);
    const BenchmarkLayout bench(root);
    orchestrator::Engine engine(dir.path / ("state" + std::to_string(seed)));
    for (int r = 0; r < 10; ++r) {
      auto adaptor = adaptors::default_spec(r % 2 ? adaptors::Strategy::linear_probe : adaptors::Strategy::knn);
      adaptor.seed = seed * 100 + std::uint64_t(r);
      const auto out = engine.run("team" + std::to_string(r), Phase::check, {all}, "baseline", bench, adaptor);
      ++runs;
      const auto ws = engine.run_dir(out.submission.submission_id);
      const auto report = orchestrator::audit_information_flow(ws, &bench);
      if (report.clean() && out.audit.clean() && out.submission.status == SubmissionStatus::succeeded) ++clean;

      // plant one canary of a rotating kind, then audit again
      const int task = 1 + (r * 7 + int(seed)) % 20;
      const auto scratch = ws / "algorithm" / "tasks" / std::to_string(task) / "scratch";
      const auto split = SequesteredStore(bench).load_splits(task);
      fs::path planted;
      switch ((r + int(seed)) % 4) {
        case 0:
          planted = scratch / ("cache-" + std::to_string(r) + ".bin");
          fs::create_directories(scratch);
          fs::copy_file(bench.label_path(task, split.validation.front()), planted);
          break;
        case 1:
          planted = scratch / "splits.json";
          write_text_file(planted, read_text_file(bench.splits_path(task)));
          break;
        case 2:
          planted = ws / "algorithm" / "tasks" / std::to_string(task) / "cases" / split.few_shot.front() / "manifest.json";
          write_text_file(planted, "{\"case_id\": \"" + split.few_shot.front() + "\", \"split\": \"few_shot\"}\n");
          break;
        default:
          planted = ws / "algorithm" / "sequestered" / "notes.txt";
          write_text_file(planted, "copied\n");
          break;
      }
      if (!orchestrator::audit_information_flow(ws, &bench).clean()) ++detected;
      fs::remove(planted);
    }
  }
  o.expect(clean == 50, "clean audits " + std::to_string(clean) + "/50");
  o.expect(detected == 50, "canaries detected " + std::to_string(detected) + "/50");
  o.note << runs << " seeded runs clean " << clean << "/50, canaries detected " << detected << "/50";
}

// ------------------------------------------------------------------ 8

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(UNICORN_CLI) + " " + args + " >>" + log.string() + " 2>&1";
  return std::system(cmd.c_str());
}

std::map<std::string, std::string> read_dir(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& f : fs::directory_iterator(root))
    if (f.is_regular_file()) out[f.path().filename().string()] = read_text_file(f.path());
  return out;
}

void end_to_end(Outcome& o) {
  Scratch dir("e2e");
  const auto t0 = Clock::now();
  std::vector<std::map<std::string, std::string>> boards;
  for (int rep = 0; rep < 2; ++rep) {
    const auto root = dir.path / ("seed7-" + std::to_string(rep));
    const auto log = dir.path / ("cli-" + std::to_string(rep) + ".log");
    const std::string common = " --benchmark " + root.string() + " --team t --target all_tasks --algorithm baseline --adaptor knn";
    int rc = cli("generate --seed 7 --out " + root.string(), log);
    rc |= cli("run --phase check" + common, log);
    rc |= cli("run --phase validation" + common, log);
    rc |= cli("run --phase test" + common, log);
    o.expect(rc == 0, "CLI run failed, see " + log.string());
    boards.push_back(read_dir(root / "state" / "leaderboards"));
  }
  const double cli_secs = seconds_since(t0);
  o.expect(boards[0].size() == 5, "expected 5 leaderboards");
  o.expect(boards[0] == boards[1], "leaderboards differ between two runs");
  o.expect(cli_secs < 300.0, "two CLI pipelines took longer than 5 minutes");

  harness::register_baseline();
  const auto all = LeaderboardTarget::named(Kind::all_tasks);
  std::ostringstream scores;
  double lowest = INFINITY;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    harness::SyntheticBenchmarkSpec spec;
    spec.seed = seed;
    const auto root = dir.path / ("bench" + std::to_string(seed));
    harness::generate_benchmark(spec, root);
    const BenchmarkLayout bench(root);
    orchestrator::Engine engine(root / "state");
    const auto knn = adaptors::default_spec(adaptors::Strategy::knn);
    engine.run("t", Phase::check, {all}, "baseline", bench, knn);
    const auto val = engine.run("t", Phase::validation, {all}, "baseline", bench, knn);
    double agg = -INFINITY;
    if (val.submission.status == SubmissionStatus::succeeded)
      agg = engine.leaderboard("validation/all_tasks").at("entries")[0].at("aggregate").get<double>();
    o.expect(agg > 0.0, "seed " + std::to_string(seed) + " aggregate " + std::to_string(agg));
    lowest = std::min(lowest, agg);
    scores << (seed > 1 ? " " : "") << std::fixed << std::setprecision(3) << agg;
  }
  o.note << "seed 7 via CLI x2 in " << std::fixed << std::setprecision(1) << cli_secs
         << " s, leaderboards identical: " << (boards[0] == boards[1] ? "yes" : "no") << "; aggregates seeds 1-10: "
         << scores.str() << " (min " << std::setprecision(3) << lowest << ")";
}

// ------------------------------------------------------------------ 9

Representation rep(const std::string& id, std::vector<double> f) {
  Representation r;
  r.case_id = id;
  r.case_features = std::move(f);
  return r;
}

std::vector<std::size_t> neighbor_set(const adaptors::FittedAdaptor& m, const std::vector<double>& query, std::size_t k) {
  const auto z = m.standardizer.apply(query);
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < m.samples(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < m.dim; ++j) s += (z[j] - m.features[i * m.dim + j]) * (z[j] - m.features[i * m.dim + j]);
    d.push_back({s, i});
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

void adaptor_numerics(Outcome& o) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  double worst_rel = 0.0;
  std::size_t grads = 0;
  for (int trial = 0; trial < 20; ++trial) {
    adaptors::ProbeProblem p;
    p.classification = trial % 2 == 0;
    p.num_classes = 2 + std::size_t(trial % 4);
    p.dim = 3 + std::size_t(trial % 5);
    p.l2 = 0.01 * trial;
    const std::size_t n = 10 + std::size_t(trial);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p.dim; ++j) p.x.push_back(n01(rng));
      p.labels.push_back(int(i % p.num_classes));
      p.targets.push_back(n01(rng));
      p.weights.push_back(0.5 + std::fabs(n01(rng)));
    }
    std::vector<double> w(p.parameters());
    for (auto& v : w) v = 0.5 * n01(rng);
    const auto g = adaptors::probe_gradient(p, w);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::fabs(w[i]));
      auto a = w, b = w;
      a[i] += h;
      b[i] -= h;
      const double fd = (adaptors::probe_loss(p, a) - adaptors::probe_loss(p, b)) / (2 * h);
      worst_rel = std::max(worst_rel, std::fabs(fd - g[i]) / std::max(1e-3, std::fabs(fd)));
      ++grads;
    }
  }
  o.expect(worst_rel <= 1e-5, "probe gradient relative error");

  const auto& t1 = load_task_registry().at(1);
  std::uniform_int_distribution<int> cls(0, 5), size(3, 30), dims(1, 6);
  std::size_t majority_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = std::size_t(size(rng));
    const auto d = std::size_t(dims(rng));
    std::vector<adaptors::FewShotExample> fs;
    std::map<int, int> counts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> f(d);
      for (auto& v : f) v = n01(rng);
      const int c = cls(rng);
      ++counts[c];
      fs.push_back({rep("f" + std::to_string(i), f), ClassLabel{c}});
    }
    int majority = -1, best = -1;
    for (const auto& [c, k] : counts)
      if (k > best) majority = c, best = k;
    auto spec = adaptors::default_spec(adaptors::Strategy::knn);
    spec.hyperparams["k"] = double(n);
    const auto m = adaptors::adaptor_fit(spec, fs, t1);
    std::vector<Representation> queries;
    for (int q = 0; q < 5; ++q) {
      std::vector<double> f(d);
      for (auto& v : f) v = 3 * n01(rng);
      queries.push_back(rep("q" + std::to_string(q), f));
    }
    bool all_majority = true;
    for (const auto& p : adaptors::adaptor_predict(m, queries, t1))
      all_majority = all_majority && std::get<ClassLabel>(p).value == majority;
    majority_ok += all_majority;
  }
  o.expect(majority_ok == 100, "k = n knn differs from the majority predictor");

  std::size_t invariant = 0;
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = std::size_t(size(rng)) + 5;
    const auto d = std::size_t(dims(rng)) + 1;
    std::vector<double> a(d), b(d);
    for (std::size_t j = 0; j < d; ++j) a[j] = scale(rng), b[j] = shift(rng);
    auto transform = [&](std::vector<double> f) {
      for (std::size_t j = 0; j < d; ++j) f[j] = a[j] * f[j] + b[j];
      return f;
    };
    std::vector<adaptors::FewShotExample> fs, scaled;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> f(d);
      for (auto& v : f) v = n01(rng);
      const int c = cls(rng);
      fs.push_back({rep("f" + std::to_string(i), f), ClassLabel{c}});
      scaled.push_back({rep("f" + std::to_string(i), transform(f)), ClassLabel{c}});
    }
    auto spec = adaptors::default_spec(adaptors::Strategy::knn);
    const std::size_t k = 1 + std::size_t(trial % 5);
    spec.hyperparams["k"] = double(k);
    const auto m1 = adaptors::adaptor_fit(spec, fs, t1);
    const auto m2 = adaptors::adaptor_fit(spec, scaled, t1);
    bool same = true;
    for (int q = 0; q < 5; ++q) {
      std::vector<double> f(d);
      for (auto& v : f) v = n01(rng);
      same = same && neighbor_set(m1, f, k) == neighbor_set(m2, transform(f), k);
      same = same && adaptors::classify(m1, rep("q", f)).label == adaptors::classify(m2, rep("q", transform(f))).label;
    }
    invariant += same;
  }
  o.expect(invariant == 100, "knn neighbour sets change under feature scaling");
  o.note << grads << " gradient entries, max rel err " << std::scientific << std::setprecision(2) << worst_rel
         << "; majority " << majority_ok << "/100; scaling invariance " << invariant << "/100";
}

// ------------------------------------------------------------------ 10

struct Row {
  int id;
  const char* name;
  TaskType type;
  Domain domain;
  Modality modality;
  const char* metric;
  int few, val, test;
  int tl_val, tl_test;
};

void registry_fidelity(Outcome& o) {
  using TT = TaskType;
  using D = Domain;
  using M = Modality;
  const std::vector<Row> table{
      {1, "ISUP scoring in H&E prostate biopsies", TT::classification, D::pathology, M::vision, "Quadratic weighted kappa", 48, 195, 113, 10, 10},
      {2, "Lung nodule malignancy in CT", TT::classification, D::radiology, M::vision, "AUROC", 64, 108, 533, 5, 5},
      {3, "Time to biochemical recurrence in H&E prostatectomies", TT::regression, D::pathology, M::vision, "Censored c-index", 48, 49, 521, 25, 25},
      {4, "Tumor proportion score in NSCLC IHC WSI", TT::classification, D::pathology, M::vision, "Quadratic weighted kappa", 48, 116, 474, 10, 10},
      {5, "Signet ring cells in H&E ROIs of gastric cancer", TT::detection, D::pathology, M::vision, "F1 score", 48, 79, 348, 10, 10},
      {6, "Clinically significant prostate cancer in MRI", TT::detection, D::radiology, M::vision, "Average of AUROC and AP", 48, 100, 400, 10, 10},
      {7, "Lung nodule detection in thoracic CT", TT::detection, D::radiology, M::vision, "Sensitivity", 48, 83, 83, 5, 5},
      {8, "Mitotic figures in breast cancer H&E ROIs", TT::detection, D::pathology, M::vision, "F1 score", 48, 180, 400, 10, 10},
      {9, "Tumor and stroma segmentation in breast H&E", TT::segmentation, D::pathology, M::vision, "Dice", 48, 24, 33, 5, 5},
      {10, "Universal lesion segmentation in CT ROIs", TT::segmentation, D::radiology, M::vision, "Dice, long- and short-axis errors", 48, 50, 725, 10, 10},
      {11, "Anatomical segmentation in lumbar spine MRI", TT::segmentation, D::radiology, M::vision, "Dice", 48, 48, 97, 10, 10},
      {12, "Histopathology sample origin", TT::classification, D::pathology, M::language, "Unweighted kappa", 48, 215, 297, 240, 240},
      {13, "Pulmonary nodule presence", TT::classification, D::radiology, M::language, "AUROC", 48, 300, 200, 120, 240},
      {14, "Kidney abnormality", TT::classification, D::radiology, M::language, "AUROC", 48, 125, 183, 120, 240},
      {15, "Hip Kellgren-Lawrence scoring", TT::classification, D::radiology, M::language, "Unweighted kappa", 32, 100, 108, 120, 240},
      {16, "Colon histopathology diagnosis", TT::classification, D::pathology, M::language, "Macro AUROC", 48, 250, 500, 120, 240},
      {17, "Lesion size measurements", TT::regression, D::radiology, M::language, "RSMAPE", 48, 242, 298, 120, 240},
      {18, "Prostate volume and PSA (density)", TT::regression, D::radiology, M::language, "RSMAPE", 48, 250, 500, 120, 240},
      {19, "Report anonymization", TT::named_entity_recognition, D::mixed, M::language, "Weighted F1", 48, 200, 400, 120, 240},
      {20, "WSI captioning", TT::caption_generation, D::pathology, M::vision_language, "BLEU-4, ROUGE-L, METEOR, CIDER, BERTscore", 0, 81, 310, 25, 25},
  };
  const auto& reg = load_task_registry();
  o.expect(reg.size() == table.size(), "task count");
  std::size_t fields = 0;
  for (const auto& r : table) {
    if (!reg.contains(r.id)) {
      o.expect(false, "missing task " + std::to_string(r.id));
      continue;
    }
    const auto& t = reg.at(r.id);
    const std::string at = "task " + std::to_string(r.id) + " ";
    o.expect(t.name == r.name, at + "name");
    o.expect(t.task_type == r.type, at + "type");
    o.expect(t.domain == r.domain, at + "domain");
    o.expect(t.modality == r.modality, at + "modality");
    o.expect(t.metric_label == r.metric, at + "metric");
    o.expect(t.counts == CaseCounts{r.few, r.val, r.test}, at + "case counts");
    o.expect(t.time_limit == TimeLimits{r.tl_val, r.tl_test}, at + "time limits");
    fields += 7;
  }
  o.note << table.size() << " rows, " << fields << " fields";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"normalization constants and 20-term aggregate", normalization},
      {"metric oracle equivalence", oracle_equivalence},
      {"point-matching and CPM counting rules", counting_rules},
      {"composite weights", composite_weights},
      {"identity anchors", identity_anchors},
      {"quota state machine", quota_state_machine},
      {"two-step isolation audit", isolation},
      {"end-to-end determinism and sanity", end_to_end},
      {"adaptor numerics", adaptor_numerics},
      {"registry fidelity", registry_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << " -- " << o.note.str()
              << " (" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
