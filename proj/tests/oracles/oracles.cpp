#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "unicorn/core/error.hpp"
#include "unicorn/metrics/caption.hpp"
#include "unicorn/metrics/classification.hpp"
#include "unicorn/metrics/detection.hpp"
#include "unicorn/metrics/redaction.hpp"
#include "unicorn/metrics/regression.hpp"
#include "unicorn/metrics/segmentation.hpp"
#include "unicorn/metrics/survival.hpp"

namespace unicorn::oracles {

double kappa(const std::vector<int>& p, const std::vector<int>& r, bool quadratic, int k) {
  auto w = [&](int a, int b) {
    if (!quadratic) return a == b ? 0.0 : 1.0;
    const double d = double(a - b) / double(k - 1);
    return d * d;
  };
  const double n = double(p.size());
  double obs = 0, exp = 0;
  for (std::size_t i = 0; i < p.size(); ++i) obs += w(p[i], r[i]) / n;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) exp += w(p[i], r[j]) / (n * n);
  if (exp == 0) return p == r ? 1.0 : NAN;
  return 1.0 - obs / exp;
}

double auroc(const std::vector<double>& s, const std::vector<bool>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!y[i] || y[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  return wins / pairs;
}

// Mean over all positives (found or not) of the precision at that
// positive's score threshold; missing positives add nothing.
double average_precision(const std::vector<double>& s, const std::vector<bool>& y, std::size_t total_positives) {
  double sum = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    double above = 0, pos_above = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j] >= s[i]) {
        above += 1;
        pos_above += y[j] ? 1 : 0;
      }
    sum += pos_above / above;
  }
  return sum / double(total_positives);
}

double c_index(const std::vector<double>& risk, const std::vector<bool>& event, const std::vector<double>& time) {
  double comparable = 0, concordant = 0;
  for (std::size_t i = 0; i < risk.size(); ++i)
    for (std::size_t j = 0; j < risk.size(); ++j) {
      if (i == j || !event[i]) continue;
      if (time[i] < time[j]) {
        comparable += 1;
        concordant += risk[i] > risk[j] ? 1.0 : risk[i] == risk[j] ? 0.5 : 0.0;
      } else if (time[i] == time[j] && event[j] && risk[i] != risk[j]) {
        comparable += 1;
        concordant += risk[i] > risk[j] ? 1.0 : 0.0;
      }
    }
  return concordant / comparable;
}

Counts match(const std::vector<std::vector<double>>& preds, const std::vector<std::vector<double>>& refs,
             const std::vector<double>& radii) {
  std::vector<bool> taken(refs.size(), false);
  Counts c;
  for (const auto& p : preds) {
    // (distance, index) of every reference in reach
    std::vector<std::pair<double, std::size_t>> reach;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      double d = 0;
      for (std::size_t a = 0; a < p.size(); ++a) d += (p[a] - refs[r][a]) * (p[a] - refs[r][a]);
      if (d <= radii[r] * radii[r]) reach.push_back({d, r});
    }
    std::sort(reach.begin(), reach.end());
    bool bound = false;
    for (const auto& [d, r] : reach)
      if (!taken[r]) {
        taken[r] = true;
        bound = true;
        break;
      }
    if (bound) ++c.tp;
    else if (reach.empty()) ++c.fp;
  }
  c.fn = refs.size() - c.tp;
  return c;
}

double f1(const Counts& c) {
  if (c.tp + c.fp + c.fn == 0) return 1.0;
  return 2.0 * double(c.tp) / double(2 * c.tp + c.fp + c.fn);
}

double cpm(const std::vector<PointSet>& cands, const std::vector<LesionRefs>& refs, const std::vector<double>& fp_rates) {
  auto hits = [](const ScoredPoint& p, const LesionRef& l) {
    double d = 0;
    for (std::size_t a = 0; a < p.coord.size(); ++a) d += (p.coord[a] - l.coord[a]) * (p.coord[a] - l.coord[a]);
    const double r = l.equivalent_diameter_mm / 2.0;
    return d <= r * r;
  };
  std::set<double> thresholds;
  double lesions = 0;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    lesions += double(refs[c].lesions.size());
    for (const auto& p : cands[c].points) thresholds.insert(p.confidence);
  }
  double total = 0;
  for (double target : fp_rates) {
    double best = 0;
    for (double t : thresholds) {
      double fps = 0, found = 0;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        for (const auto& p : cands[c].points) {
          if (p.confidence < t) continue;
          bool any = false;
          for (const auto& l : refs[c].lesions) any = any || hits(p, l);
          if (!any) fps += 1;
        }
        for (const auto& l : refs[c].lesions) {
          bool seen = false;
          for (const auto& p : cands[c].points) seen = seen || (p.confidence >= t && hits(p, l));
          if (seen) found += 1;
        }
      }
      if (fps / double(cands.size()) <= target) best = std::max(best, found / lesions);
    }
    total += best;
  }
  return total / double(fp_rates.size());
}

namespace {

double dice_of(const Grid<int>& p, const Grid<int>& r, const std::function<bool(int)>& in) {
  double inter = 0, sp = 0, sr = 0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const bool a = in(p.values[i]), b = in(r.values[i]);
    inter += a && b;
    sp += a;
    sr += b;
  }
  return sp + sr == 0 ? 1.0 : 2 * inter / (sp + sr);
}

}  // namespace

double dice_binary(const Grid<int>& p, const Grid<int>& r) {
  return dice_of(p, r, [](int v) { return v != 0; });
}

double dice_classes(const Grid<int>& p, const Grid<int>& r, const std::vector<int>& classes) {
  double s = 0;
  for (int c : classes) s += dice_of(p, r, [c](int v) { return v == c; });
  return s / double(classes.size());
}

double dice_instances(const Grid<int>& p, const Grid<int>& r) {
  std::set<int> labels;
  for (int v : r.values)
    if (v != 0) labels.insert(v);
  double s = 0;
  for (int l : labels) s += dice_of(p, r, [l](int v) { return v == l; });
  return s / double(labels.size());
}

double rsmapes(const std::vector<double>& p, const std::vector<double>& r, double eps) {
  double err = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double e = std::max(0.0, std::fabs(p[i] - r[i]) - eps) / ((std::fabs(p[i]) + std::fabs(r[i])) / 2 + eps);
    err += std::min(1.0, e);
  }
  return 1.0 - err / double(p.size());
}

double redaction_f1(const EntitySpans& pred, const EntitySpans& ref, std::size_t len) {
  std::vector<std::string> pt(len), rt(len);
  for (const auto& s : ref.spans)
    for (std::size_t c = s.start; c < s.end; ++c) rt[c] = s.tag;
  for (const auto& s : pred.spans)
    for (std::size_t c = s.start; c < s.end; ++c)
      if (pt[c].empty()) pt[c] = s.tag;
  double stp = 0, spred = 0, sref = 0, btp = 0;
  for (std::size_t c = 0; c < len; ++c) {
    spred += !pt[c].empty();
    sref += !rt[c].empty();
    btp += !pt[c].empty() && !rt[c].empty();
    stp += !pt[c].empty() && pt[c] == rt[c];
  }
  // fp = predicted - tp, fn = reference - tp in both views
  auto f = [&](double tp) { return spred + sref == 0 ? 1.0 : 2 * tp / (spred + sref); };
  return 0.7 * f(stp) + 0.3 * f(btp);
}

namespace {

std::vector<Words> windows(const Words& w, std::size_t n) {
  std::vector<Words> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.emplace_back(w.begin() + long(i), w.begin() + long(i + n));
  return out;
}

std::size_t occurrences(const std::vector<Words>& grams, const Words& g) {
  return std::size_t(std::count(grams.begin(), grams.end(), g));
}

}  // namespace

double bleu4(const Words& cand, const std::vector<Words>& refs, double eps) {
  double logp = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cg = windows(cand, n);
    double matched = 0;
    std::vector<Words> done;
    for (const auto& g : cg) {
      if (occurrences(done, g)) continue;
      done.push_back(g);
      std::size_t clip = 0;
      for (const auto& r : refs) clip = std::max(clip, occurrences(windows(r, n), g));
      matched += double(std::min(occurrences(cg, g), clip));
    }
    const double total = double(cg.size());
    logp += std::log(matched > 0 ? matched / total : eps / (total + eps));
  }
  // closest reference length, shorter on ties
  std::size_t best = refs[0].size();
  for (const auto& r : refs) {
    const long dn = std::labs(long(r.size()) - long(cand.size()));
    const long db = std::labs(long(best) - long(cand.size()));
    if (dn < db || (dn == db && r.size() < best)) best = r.size();
  }
  const double bp = cand.size() > best ? 1.0 : std::exp(1.0 - double(best) / double(cand.size()));
  return bp * std::exp(logp / 4);
}

double rouge_l(const Words& cand, const std::vector<Words>& refs, double beta) {
  double best = 0;
  for (const auto& r : refs) {
    // longest candidate subsequence that is also a subsequence of r
    std::size_t lcs = 0;
    for (std::uint32_t mask = 0; mask < (1u << cand.size()); ++mask) {
      std::size_t k = 0, len = 0;
      bool ok = true;
      for (std::size_t i = 0; i < cand.size() && ok; ++i) {
        if (!(mask >> i & 1u)) continue;
        ++len;
        while (k < r.size() && r[k] != cand[i]) ++k;
        if (k == r.size()) ok = false;
        else ++k;
      }
      if (ok) lcs = std::max(lcs, len);
    }
    if (lcs == 0) continue;
    const double p = double(lcs) / double(cand.size()), rc = double(lcs) / double(r.size());
    best = std::max(best, (1 + beta * beta) * p * rc / (rc + beta * beta * p));
  }
  return best;
}

double cider(const Words& cand, const std::vector<Words>& refs, const std::vector<Words>& corpus) {
  auto idf = [&](const Words& g) {
    double df = 0;
    for (const auto& d : corpus) df += occurrences(windows(d, g.size()), g) > 0;
    return std::log((1.0 + double(corpus.size())) / (1.0 + df)) + 1.0;
  };
  double total = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cg = windows(cand, n);
    double order = 0;
    for (const auto& r : refs) {
      const auto rg = windows(r, n);
      if (cg.empty() || rg.empty()) {
        order += cg.empty() && rg.empty();
        continue;
      }
      std::vector<Words> vocab = cg;
      vocab.insert(vocab.end(), rg.begin(), rg.end());
      std::sort(vocab.begin(), vocab.end());
      vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
      double dot = 0, nc = 0, nr = 0;
      for (const auto& g : vocab) {
        const double w = idf(g);
        const double a = double(occurrences(cg, g)) * w, b = double(occurrences(rg, g)) * w;
        dot += a * b;
        nc += a * a;
        nr += b * b;
      }
      order += dot / std::sqrt(nc * nr);
    }
    total += order / double(refs.size());
  }
  return total / 4;
}

double unicorn_all_tasks(const std::vector<double>& S) {
  const auto s = [&](int i) { return S[std::size_t(i - 1)]; };
  return (s(1) + (s(2) - 0.5) / 0.5 + (s(3) - 0.5) / 0.5 + s(4) + s(5) + (s(6) - 0.25) / 0.75 + s(7) + s(8) +
          (s(9) - 0.2548) / 0.7452 + s(10) + s(11) + s(12) + (s(13) - 0.5) / 0.5 + (s(14) - 0.5) / 0.5 + s(15) +
          (s(16) - 0.5) / 0.5 + (s(17) - 0.7580) / 0.2420 + (s(18) - 0.7668) / 0.2332 + s(19) + s(20)) /
         20.0;
}

// ---------------------------------------------------------------- runner

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  int i(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool b(double p = 0.5) { return u(0, 1) < p; }
  // coarse values produce plenty of ties
  double score() { return b() ? i(0, 4) / 4.0 : u(0, 1); }

  std::vector<bool> labels(std::size_t n) {
    std::vector<bool> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = b();
    y[0] = true;
    y[1] = false;
    std::shuffle(y.begin(), y.end(), eng_);
    return y;
  }

  Grid<int> grid(const std::vector<std::size_t>& dims, int max_label) {
    Grid<int> g(dims, std::vector<double>(dims.size(), 1.0));
    for (auto& v : g.values) v = i(0, max_label);
    return g;
  }

  metrics::Tokens words(std::size_t lo, std::size_t hi) {
    static const std::vector<std::string> vocab = {"tumor", "cells", "with", "dense", "stroma"};
    metrics::Tokens w(static_cast<std::size_t>(i(int(lo), int(hi))));
    for (auto& t : w) t = vocab[std::size_t(i(0, 4))];
    return w;
  }

 private:
  std::mt19937_64 eng_;
};

struct Tally {
  OracleCheck check;
  double tol;
  void compare(double lib, double oracle) {
    ++check.instances;
    const double d = std::fabs(lib - oracle);
    check.max_abs_diff = std::max(check.max_abs_diff, std::isnan(d) ? INFINITY : d);
    if (!(d <= tol)) ++check.mismatches;
  }
};

}  // namespace

std::vector<OracleCheck> run_metric_oracles(std::uint64_t seed, std::size_t instances, double tol) {
  Gen g(seed);
  std::vector<OracleCheck> out;
  auto run = [&](const std::string& name, const std::function<void(Tally&)>& one) {
    Tally t{{name, 0, 0, 0.0}, tol};
    for (std::size_t k = 0; k < instances; ++k) one(t);
    out.push_back(t.check);
  };

  for (bool quadratic : {false, true})
    run(quadratic ? "kappa_quadratic" : "kappa_unweighted", [&](Tally& t) {
      const int k = g.i(2, 6);
      const std::size_t n = std::size_t(g.i(2, 30));
      std::vector<int> p(n), r(n);
      for (auto& v : p) v = g.i(0, k - 1);
      for (auto& v : r) v = g.i(0, k - 1);
      r[0] = 0;
      r[1] = k - 1;
      t.compare(metrics::cohen_kappa(p, r, quadratic ? metrics::KappaWeighting::quadratic : metrics::KappaWeighting::none, k),
                kappa(p, r, quadratic, k));
    });

  run("auroc", [&](Tally& t) {
    const std::size_t n = std::size_t(g.i(2, 30));
    std::vector<double> s(n);
    for (auto& v : s) v = g.score();
    const auto y = g.labels(n);
    t.compare(metrics::auroc(s, y), auroc(s, y));
  });

  run("average_precision", [&](Tally& t) {
    const std::size_t n = std::size_t(g.i(2, 30));
    std::vector<double> s(n);
    for (auto& v : s) v = g.score();
    const auto y = g.labels(n);
    const std::size_t total = std::size_t(std::count(y.begin(), y.end(), true)) + std::size_t(g.i(0, 3));
    t.compare(metrics::average_precision(s, y, total), average_precision(s, y, total));
  });

  run("macro_auroc", [&](Tally& t) {
    const std::size_t n = std::size_t(g.i(2, 20));
    std::map<std::string, metrics::LabelScores> per;
    double expect = 0;
    for (const char* name : {"a", "b", "c"}) {
      auto& ls = per[name];
      for (std::size_t k = 0; k < n; ++k) ls.scores.push_back(g.score());
      ls.labels = g.labels(n);
      expect += auroc(ls.scores, ls.labels) / 3.0;
    }
    t.compare(metrics::macro_auroc(per), expect);
  });

  run("c_index", [&](Tally& t) {
    for (;;) {
      const std::size_t n = std::size_t(g.i(2, 20));
      std::vector<double> risk(n), time(n);
      std::vector<bool> ev(n);
      for (std::size_t k = 0; k < n; ++k) {
        risk[k] = g.score();
        time[k] = g.i(0, 6);
        ev[k] = g.b(0.6);
      }
      double comparable = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          comparable += a != b && ev[a] && (time[a] < time[b] || (time[a] == time[b] && ev[b] && risk[a] != risk[b]));
      if (comparable == 0) continue;
      t.compare(metrics::concordance_index_censored(risk, ev, time), c_index(risk, ev, time));
      return;
    }
  });

  run("point_matching_f1", [&](Tally& t) {
    PointSet ps;
    LesionRefs lr;
    std::vector<std::vector<double>> pc, rc;
    std::vector<double> radii;
    const bool fixed = g.b();
    const double radius = g.u(1, 6);
    for (int k = g.i(0, 6); k > 0; --k) {
      ps.points.push_back({{double(g.i(0, 20)), double(g.i(0, 20))}, 1.0});
      pc.push_back(ps.points.back().coord);
    }
    for (int k = g.i(0, 5); k > 0; --k) {
      lr.lesions.push_back({{double(g.i(0, 20)), double(g.i(0, 20))}, double(g.i(2, 12))});
      rc.push_back(lr.lesions.back().coord);
      radii.push_back(fixed ? radius : lr.lesions.back().equivalent_diameter_mm / 2.0);
    }
    const auto rule = fixed ? metrics::HitRadiusRule::fixed(radius) : metrics::HitRadiusRule::half_diameter();
    t.compare(metrics::detection_f1(metrics::match_points(ps, lr, rule)), f1(match(pc, rc, radii)));
  });

  run("froc_cpm", [&](Tally& t) {
    const int cases = g.i(1, 5);
    std::vector<PointSet> cands(static_cast<std::size_t>(cases));
    std::vector<LesionRefs> refs(static_cast<std::size_t>(cases));
    for (int c = 0; c < cases; ++c) {
      for (int k = g.i(0, 4); k > 0; --k)
        refs[std::size_t(c)].lesions.push_back({{double(g.i(0, 16)), double(g.i(0, 16))}, double(g.i(2, 10))});
      for (int k = g.i(0, 6); k > 0; --k)
        cands[std::size_t(c)].points.push_back({{double(g.i(0, 16)), double(g.i(0, 16))}, g.score()});
    }
    if (refs[0].lesions.empty()) refs[0].lesions.push_back({{4.0, 4.0}, 6.0});
    t.compare(metrics::froc_cpm(cands, refs).cpm, cpm(cands, refs));
  });

  run("dice_binary", [&](Tally& t) {
    const std::vector<std::size_t> dims{std::size_t(g.i(1, 6)), std::size_t(g.i(1, 6))};
    const auto p = g.grid(dims, g.i(0, 2)), r = g.grid(dims, g.i(0, 2));
    t.compare(metrics::dice(p, r), dice_binary(p, r));
  });

  run("dice_multiclass", [&](Tally& t) {
    const std::vector<std::size_t> dims{std::size_t(g.i(1, 4)), std::size_t(g.i(1, 5)), std::size_t(g.i(1, 5))};
    const auto p = g.grid(dims, 3), r = g.grid(dims, 3);
    const std::vector<int> classes{1, 2, 3};
    t.compare(metrics::dice(p, r, metrics::DiceMode::multiclass_mean(classes)), dice_classes(p, r, classes));
  });

  run("dice_instance", [&](Tally& t) {
    const std::vector<std::size_t> dims{std::size_t(g.i(2, 6)), std::size_t(g.i(2, 6))};
    const auto p = g.grid(dims, 4);
    auto r = g.grid(dims, 4);
    r.values[0] = g.i(1, 4);
    t.compare(metrics::instance_averaged_dice(p, r), dice_instances(p, r));
  });

  run("rsmapes", [&](Tally& t) {
    const std::size_t n = std::size_t(g.i(1, 20));
    std::vector<double> p(n), r(n);
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = g.u(0, 50);
      p[k] = g.b(0.2) ? r[k] + g.u(-2, 2) : g.u(-10, 60);
    }
    const double eps = g.u(0.01, 5);
    t.compare(metrics::rsmapes(p, r, eps), rsmapes(p, r, eps));
  });

  run("blended_redaction_f1", [&](Tally& t) {
    const std::size_t len = std::size_t(g.i(1, 40));
    static const std::vector<std::string> tags = {"person", "date", "id"};
    EntitySpans ref, pred;
    for (std::size_t pos = std::size_t(g.i(0, 3)); pos < len;) {
      const std::size_t end = std::min(len, pos + std::size_t(g.i(1, 6)));
      if (g.b(0.6)) ref.spans.push_back({pos, end, tags[std::size_t(g.i(0, 2))]});
      pos = end + std::size_t(g.i(0, 4));
    }
    for (int k = g.i(0, 5); k > 0; --k) {
      const std::size_t s = std::size_t(g.i(0, int(len) - 1));
      const std::size_t e = std::min(len, s + std::size_t(g.i(1, 8)));
      pred.spans.push_back({s, e, tags[std::size_t(g.i(0, 2))]});
    }
    t.compare(metrics::blended_redaction_f1(pred, ref, len), redaction_f1(pred, ref, len));
  });

  auto caption_instance = [&](metrics::Tokens& cand, std::vector<metrics::Tokens>& refs) {
    cand = g.words(1, 8);
    refs.clear();
    for (int k = g.i(1, 3); k > 0; --k) refs.push_back(g.words(1, 8));
  };
  run("bleu4", [&](Tally& t) {
    metrics::Tokens cand;
    std::vector<metrics::Tokens> refs;
    caption_instance(cand, refs);
    t.compare(metrics::bleu4(cand, refs), bleu4(cand, refs));
  });
  run("rouge_l", [&](Tally& t) {
    metrics::Tokens cand;
    std::vector<metrics::Tokens> refs;
    caption_instance(cand, refs);
    t.compare(metrics::rouge_l(cand, refs), rouge_l(cand, refs));
  });
  run("cider", [&](Tally& t) {
    metrics::Tokens cand;
    std::vector<metrics::Tokens> refs;
    caption_instance(cand, refs);
    std::vector<metrics::Tokens> corpus = refs;
    for (int k = g.i(0, 4); k > 0; --k) corpus.push_back(g.words(1, 8));
    t.compare(metrics::cider(cand, refs, metrics::CiderCorpus(corpus)), cider(cand, refs, corpus));
  });
  return out;
}

void print_checks(std::ostream& out, const std::vector<OracleCheck>& checks) {
  for (const auto& c : checks)
    out << (c.passed() ? "PASS " : "FAIL ") << std::left << std::setw(22) << c.metric << " instances=" << c.instances
        << " mismatches=" << c.mismatches << " max_abs_diff=" << std::scientific << std::setprecision(2)
        << c.max_abs_diff << std::defaultfloat << "\n";
}

}  // namespace unicorn::oracles
