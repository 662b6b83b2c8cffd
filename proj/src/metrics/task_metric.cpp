#include "unicorn/metrics/task_metric.hpp"

#include <algorithm>

#include "unicorn/core/error.hpp"
#include "unicorn/metrics/classification.hpp"
#include "unicorn/metrics/detection.hpp"
#include "unicorn/metrics/redaction.hpp"
#include "unicorn/metrics/regression.hpp"
#include "unicorn/metrics/segmentation.hpp"
#include "unicorn/metrics/survival.hpp"

namespace unicorn::metrics {
namespace {

template <typename T>
const T& as(const Prediction& p, int task_id) {
  const T* v = std::get_if<T>(&p);
  if (!v) fail("metric", "task " + std::to_string(task_id) + ": unexpected prediction " + std::string(variant_name(p)));
  return *v;
}

template <typename T>
const T& ref_as(const ArchiveItem& item, int task_id) {
  const T* v = std::get_if<T>(&item.reference);
  if (!v)
    fail("metric", "task " + std::to_string(task_id) + ": unexpected reference " +
                       std::string(variant_name(item.reference)) + " for case " + item.case_id);
  return *v;
}

double ref_binary(const ArchiveItem& item, int task_id) {
  const int v = ref_as<ClassLabel>(item, task_id).value;
  if (v != 0 && v != 1) fail("metric", "binary reference expected for case " + item.case_id);
  return v;
}

AxisMeasurement axes_or_zero(const Grid<int>& m) {
  if (std::none_of(m.values.begin(), m.values.end(), [](int v) { return v != 0; })) return {};
  return axis_measurements(m);
}

struct Ctx {
  const TaskDefinition& task;
  const std::vector<ArchiveItem>& items;
  const std::vector<Prediction>& preds;
  const TokenEmbedder* embedder;
  int id() const { return task.task_id; }
  std::size_t n() const { return items.size(); }
};

TaskEvaluation kappa(const Ctx& c, KappaWeighting w) {
  std::vector<int> p, r;
  for (std::size_t i = 0; i < c.n(); ++i) {
    p.push_back(as<ClassLabel>(c.preds[i], c.id()).value);
    r.push_back(ref_as<ClassLabel>(c.items[i], c.id()).value);
  }
  return {cohen_kappa(p, r, w, c.task.params.num_classes), {}};
}

TaskEvaluation pooled_kappa(const Ctx& c) {
  std::vector<PairedLabels> p, r;
  for (std::size_t i = 0; i < c.n(); ++i) {
    p.push_back(as<PairedLabels>(c.preds[i], c.id()));
    r.push_back(ref_as<PairedLabels>(c.items[i], c.id()));
  }
  return {kappa_pooled_pairs(p, r, c.task.params.num_classes), {}};
}

TaskEvaluation binary_auroc(const Ctx& c) {
  std::vector<double> s;
  std::vector<bool> l;
  for (std::size_t i = 0; i < c.n(); ++i) {
    s.push_back(as<Probability>(c.preds[i], c.id()).value);
    l.push_back(ref_binary(c.items[i], c.id()) > 0.5);
  }
  return {auroc(s, l), {}};
}

TaskEvaluation multi_auroc(const Ctx& c) {
  std::map<std::string, LabelScores> per;
  for (const auto& name : c.task.params.label_names) per[name];
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto& p = as<MultiLabel>(c.preds[i], c.id()).values;
    const auto& r = ref_as<MultiLabel>(c.items[i], c.id()).values;
    for (auto& [name, ls] : per) {
      const auto pi = p.find(name);
      const auto ri = r.find(name);
      if (pi == p.end() || ri == r.end()) fail("metric", "label '" + name + "' missing for case " + c.items[i].case_id);
      ls.scores.push_back(pi->second);
      ls.labels.push_back(ri->second > 0.5);
    }
  }
  TaskEvaluation e;
  for (const auto& [name, ls] : per) e.details["auroc_" + name] = auroc(ls.scores, ls.labels);
  e.raw_score = macro_auroc(per);
  return e;
}

TaskEvaluation c_index(const Ctx& c) {
  std::vector<double> risk, time;
  std::vector<bool> event;
  for (std::size_t i = 0; i < c.n(); ++i) {
    risk.push_back(as<Continuous>(c.preds[i], c.id()).value);
    const auto& s = ref_as<SurvivalLabel>(c.items[i], c.id());
    event.push_back(s.event);
    time.push_back(s.time_years);
  }
  return {concordance_index_censored(risk, event, time), {}};
}

HitRadiusRule hit_rule(const TaskDefinition& t) {
  return t.params.hit_radius > 0.0 ? HitRadiusRule::fixed(t.params.hit_radius) : HitRadiusRule::half_diameter();
}

TaskEvaluation point_f1(const Ctx& c) {
  MatchCounts total;
  const auto rule = hit_rule(c.task);
  for (std::size_t i = 0; i < c.n(); ++i)
    total += match_points(as<PointSet>(c.preds[i], c.id()), ref_as<LesionRefs>(c.items[i], c.id()), rule);
  TaskEvaluation e{detection_f1(total), {}};
  e.details["tp"] = static_cast<double>(total.tp);
  e.details["fp"] = static_cast<double>(total.fp);
  e.details["fn"] = static_cast<double>(total.fn);
  return e;
}

TaskEvaluation auroc_ap(const Ctx& c) {
  std::vector<std::pair<double, bool>> case_probs;
  std::vector<PointSet> cands;
  std::vector<LesionRefs> refs;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto& p = as<PointSet>(c.preds[i], c.id());
    const auto& r = ref_as<LesionRefs>(c.items[i], c.id());
    if (!p.case_probability) fail("metric", "missing case probability for case " + c.items[i].case_id);
    case_probs.emplace_back(*p.case_probability, !r.lesions.empty());
    cands.push_back(p);
    refs.push_back(r);
  }
  return {detection_auroc_ap(case_probs, cands, refs, hit_rule(c.task)), {}};
}

TaskEvaluation froc(const Ctx& c) {
  std::vector<PointSet> cands;
  std::vector<LesionRefs> refs;
  for (std::size_t i = 0; i < c.n(); ++i) {
    cands.push_back(as<PointSet>(c.preds[i], c.id()));
    refs.push_back(ref_as<LesionRefs>(c.items[i], c.id()));
  }
  FrocConfig cfg;
  cfg.hit_rule = hit_rule(c.task);
  return {froc_cpm(cands, refs, cfg).cpm, {}};
}

TaskEvaluation dice_multi(const Ctx& c) {
  double sum = 0.0;
  const auto mode = DiceMode::multiclass_mean(c.task.params.foreground_classes);
  for (std::size_t i = 0; i < c.n(); ++i)
    sum += dice(as<Mask>(c.preds[i], c.id()).grid, ref_as<Mask>(c.items[i], c.id()).grid, mode);
  return {sum / static_cast<double>(c.n()), {}};
}

TaskEvaluation uls(const Ctx& c) {
  double sum = 0.0, sp = 0.0, lae = 0.0, sae = 0.0;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto& p = as<Mask>(c.preds[i], c.id()).grid;
    const auto& r = ref_as<Mask>(c.items[i], c.id()).grid;
    const double d = dice(p, r);
    const auto pa = axes_or_zero(p);
    const auto ra = axes_or_zero(r);
    const double l = axis_agreement(pa.long_axis_mm, ra.long_axis_mm);
    const double s = axis_agreement(pa.short_axis_mm, ra.short_axis_mm);
    sp += d;
    lae += l;
    sae += s;
    sum += uls_composite(d, l, s);
  }
  const double n = static_cast<double>(c.n());
  return {sum / n, {{"segmentation", sp / n}, {"long_axis", lae / n}, {"short_axis", sae / n}}};
}

TaskEvaluation inst_dice(const Ctx& c) {
  double sum = 0.0;
  for (std::size_t i = 0; i < c.n(); ++i)
    sum += instance_averaged_dice(as<Mask>(c.preds[i], c.id()).grid, ref_as<Mask>(c.items[i], c.id()).grid);
  return {sum / static_cast<double>(c.n()), {}};
}

TaskEvaluation rsmapes_single(const Ctx& c) {
  if (c.task.params.epsilons.size() != 1) fail("config", "RSMAPES task needs exactly one epsilon");
  std::vector<double> p, r;
  for (std::size_t i = 0; i < c.n(); ++i) {
    p.push_back(as<Continuous>(c.preds[i], c.id()).value);
    r.push_back(ref_as<Continuous>(c.items[i], c.id()).value);
  }
  return {rsmapes(p, r, c.task.params.epsilons.front()), {}};
}

TaskEvaluation rsmapes_vars(const Ctx& c) {
  const auto& names = c.task.params.label_names;
  if (names.size() != c.task.params.epsilons.size() || names.empty())
    fail("config", "RSMAPES variables and epsilons differ in count");
  std::vector<RsmapesVariable> vars(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) vars[k].epsilon = c.task.params.epsilons[k];
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto& p = as<MultiLabel>(c.preds[i], c.id()).values;
    const auto& r = ref_as<MultiLabel>(c.items[i], c.id()).values;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const auto pi = p.find(names[k]);
      const auto ri = r.find(names[k]);
      if (pi == p.end() || ri == r.end())
        fail("metric", "variable '" + names[k] + "' missing for case " + c.items[i].case_id);
      vars[k].preds.push_back(pi->second);
      vars[k].refs.push_back(ri->second);
    }
  }
  TaskEvaluation e{rsmapes_multi(vars), {}};
  for (std::size_t k = 0; k < names.size(); ++k)
    e.details["rsmapes_" + names[k]] = rsmapes(vars[k].preds, vars[k].refs, vars[k].epsilon);
  return e;
}

TaskEvaluation redaction(const Ctx& c) {
  RedactionCounts total;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto* text = std::get_if<ReportText>(&c.items[i].payload);
    if (!text) fail("metric", "redaction task needs report payloads");
    total += redaction_counts(as<EntitySpans>(c.preds[i], c.id()), ref_as<EntitySpans>(c.items[i], c.id()),
                              text->text.size());
  }
  const auto s = score_redaction(total);
  return {s.blended, {{"strict_f1", s.strict}, {"binary_f1", s.binary}}};
}

TaskEvaluation captions(const Ctx& c) {
  std::vector<Tokens> docs;
  for (const auto& item : c.items) docs.push_back(tokenize(ref_as<Caption>(item, c.id()).text));
  const CiderCorpus corpus(docs);
  const HashedNgramEmbedder fallback;
  const TokenEmbedder& emb = c.embedder ? *c.embedder : fallback;
  CaptionScores sum;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto s = caption_score(as<Caption>(c.preds[i], c.id()).text, {ref_as<Caption>(c.items[i], c.id()).text},
                                 corpus, emb);
    sum.bleu4 += s.bleu4;
    sum.rouge_l += s.rouge_l;
    sum.cider += s.cider;
    sum.meteor += s.meteor;
    sum.embedding += s.embedding;
    sum.composite += s.composite;
  }
  const double n = static_cast<double>(c.n());
  return {sum.composite / n,
          {{"bleu4", sum.bleu4 / n},
           {"rouge_l", sum.rouge_l / n},
           {"cider", sum.cider / n},
           {"meteor", sum.meteor / n},
           {"embedding", sum.embedding / n}}};
}

}  // namespace

TaskEvaluation evaluate_task(const TaskDefinition& task, const std::vector<ArchiveItem>& items,
                             const std::vector<Prediction>& preds, const TokenEmbedder* embedder) {
  if (items.size() != preds.size()) fail("metric", "prediction count differs from evaluation case count");
  if (items.empty()) fail("metric", "task " + std::to_string(task.task_id) + ": no evaluation cases");
  const Ctx c{task, items, preds, embedder};
  switch (task.metric_spec) {
    case MetricSpec::quadratic_weighted_kappa: return kappa(c, KappaWeighting::quadratic);
    case MetricSpec::unweighted_kappa: return kappa(c, KappaWeighting::none);
    case MetricSpec::pooled_pair_kappa: return pooled_kappa(c);
    case MetricSpec::auroc: return binary_auroc(c);
    case MetricSpec::macro_auroc: return multi_auroc(c);
    case MetricSpec::censored_c_index: return c_index(c);
    case MetricSpec::detection_f1: return point_f1(c);
    case MetricSpec::auroc_ap_average: return auroc_ap(c);
    case MetricSpec::froc_cpm: return froc(c);
    case MetricSpec::dice_multiclass: return dice_multi(c);
    case MetricSpec::uls_composite: return uls(c);
    case MetricSpec::instance_dice: return inst_dice(c);
    case MetricSpec::rsmapes: return rsmapes_single(c);
    case MetricSpec::rsmapes_multi: return rsmapes_vars(c);
    case MetricSpec::blended_redaction_f1: return redaction(c);
    case MetricSpec::caption_composite: return captions(c);
  }
  fail("metric", "unknown metric family");
}

}  // namespace unicorn::metrics
