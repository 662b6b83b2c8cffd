#include "unicorn/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "unicorn/core/benchmark_store.hpp"
#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"

namespace unicorn::harness {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  double normal(double m, double s) { return std::normal_distribution<double>(m, s)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::uint64_t bits() { return eng_(); }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), eng_);
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

double q3(double v) { return std::round(v * 1000.0) / 1000.0; }

// ------------------------------------------------------------------ grids

using Dims = std::vector<std::size_t>;

void paint(Grid<int>& g, const std::vector<double>& centre, const std::vector<double>& radii, int label) {
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.unravel(f);
    double s = 0.0;
    for (std::size_t a = 0; a < g.rank(); ++a) {
      const double d = (static_cast<double>(idx[a]) - centre[a]) / radii[a];
      s += d * d;
    }
    if (s <= 1.0) g[f] = label;
  }
}

Grid<double> render(const Grid<int>& regions, const std::vector<double>& means, double sd, Rng& rng) {
  Grid<double> img(regions.dims, regions.spacing);
  for (std::size_t f = 0; f < regions.size(); ++f)
    img[f] = q3(means[static_cast<std::size_t>(regions[f])] + rng.normal(0.0, sd));
  return img;
}

Grid<int> tissue_region(Rng& rng) {
  Grid<int> g({32, 32}, {1.0, 1.0});
  paint(g, {16.0 + rng.integer(-2, 2), 16.0 + rng.integer(-2, 2)}, {rng.uniform(10, 13), rng.uniform(10, 13)}, 1);
  return g;
}

std::vector<double> physical(const std::vector<double>& idx, const std::vector<double>& spacing) {
  std::vector<double> p(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) p[a] = idx[a] * spacing[a];
  return p;
}

// Integer centres inside [lo, hi] per axis, pairwise separated by > min_sep voxels.
std::vector<std::vector<double>> place(Rng& rng, int n, const std::vector<std::pair<int, int>>& box, double min_sep) {
  std::vector<std::vector<double>> out;
  for (int attempt = 0; attempt < 200 && static_cast<int>(out.size()) < n; ++attempt) {
    std::vector<double> c;
    for (const auto& [lo, hi] : box) c.push_back(rng.integer(lo, hi));
    bool ok = true;
    for (const auto& o : out) {
      double d = 0.0;
      for (std::size_t a = 0; a < c.size(); ++a) d += (c[a] - o[a]) * (c[a] - o[a]);
      ok = ok && std::sqrt(d) > min_sep;
    }
    if (ok) out.push_back(c);
  }
  return out;
}

// ------------------------------------------------------------- vision tasks

struct Generated {
  CasePayload payload;
  ReferenceLabel reference;
};

Generated grade_case(Rng& rng, int cls, double step) {
  const auto reg = tissue_region(rng);
  const double m = 0.25 + step * cls + rng.normal(0.0, 0.03);
  return {VisionGrid{render(reg, {0.9, m}, 0.08, rng), reg}, ClassLabel{cls}};
}

Generated nodule_case(Rng& rng, int cls) {
  Grid<int> reg({6, 24, 24}, {2.0, 1.0, 1.0});
  const double r = cls ? rng.uniform(3.5, 5.0) : rng.uniform(2.0, 3.5);
  paint(reg, {2.5 + rng.integer(0, 1), 12.0 + rng.integer(-3, 3), 12.0 + rng.integer(-3, 3)}, {r / 2.0, r, r}, 1);
  const double m = cls ? rng.normal(0.72, 0.06) : rng.normal(0.55, 0.06);
  return {VisionGrid{render(reg, {0.3, m}, 0.05, rng), std::nullopt}, ClassLabel{cls}};
}

Generated recurrence_case(Rng& rng, bool force_event) {
  const auto reg = tissue_region(rng);
  const double risk = rng.uniform(0.0, 1.0);
  const double t = 10.0 * std::exp(-2.0 * risk) * rng.uniform(0.8, 1.25);
  const bool event = force_event || rng.chance(0.7);
  const double time = q3(event ? t : t * rng.uniform(0.3, 1.0));
  const double m = 0.3 + 0.4 * risk + rng.normal(0.0, 0.03);
  return {VisionGrid{render(reg, {0.9, m}, 0.08, rng), reg}, SurvivalLabel{event, time}};
}

Generated proportion_case(Rng& rng, int cls) {
  auto reg = tissue_region(rng);
  const Grid<int> mask = reg;
  const double p = cls == 0 ? rng.uniform(0.0, 0.01) : cls == 1 ? rng.uniform(0.05, 0.45) : rng.uniform(0.55, 0.95);
  for (auto& v : reg.values)
    if (v == 1 && rng.chance(p)) v = 2;
  return {VisionGrid{render(reg, {0.9, 0.3, 0.8}, 0.05, rng), mask}, ClassLabel{cls}};
}

Generated cell_case(Rng& rng, double cell_mean) {
  Grid<int> reg({48, 48}, {1.0, 1.0});
  const auto centres = place(rng, rng.integer(1, 4), {{4, 43}, {4, 43}}, 10.0);
  LesionRefs refs;
  for (const auto& c : centres) {
    paint(reg, c, {2.0, 2.0}, 1);
    refs.lesions.push_back({physical(c, reg.spacing), 4.0});
  }
  return {VisionGrid{render(reg, {0.35, cell_mean}, 0.05, rng), std::nullopt}, refs};
}

Generated prostate_case(Rng& rng, int cls) {
  Grid<int> reg({6, 24, 24}, {2.0, 1.0, 1.0});
  paint(reg, {2.5, 12.0, 12.0}, {2.5, 10.0, 10.0}, 1);
  LesionRefs refs;
  if (cls == 1) {
    const std::vector<double> c{static_cast<double>(rng.integer(2, 3)), static_cast<double>(rng.integer(9, 15)),
                                static_cast<double>(rng.integer(9, 15))};
    paint(reg, c, {1.5, 6.0, 6.0}, 2);
    refs.lesions.push_back({physical(c, reg.spacing), 12.0});
  }
  return {VisionGrid{render(reg, {0.2, 0.45, 0.8}, 0.05, rng), std::nullopt}, refs};
}

Generated lung_nodule_case(Rng& rng) {
  Grid<int> reg({6, 24, 24}, {2.0, 1.0, 1.0});
  const auto centres = place(rng, rng.integer(1, 2), {{2, 3}, {6, 17}, {6, 17}}, 10.0);
  LesionRefs refs;
  for (const auto& c : centres) {
    paint(reg, c, {1.5, 6.0, 6.0}, 1);
    refs.lesions.push_back({physical(c, reg.spacing), 12.0});
  }
  return {VisionGrid{render(reg, {0.1, 0.7}, 0.06, rng), std::nullopt}, refs};
}

Generated tissue_segmentation_case(Rng& rng) {
  Grid<int> reg({48, 48}, {1.0, 1.0});
  std::vector<int> blocks(25);
  for (auto& b : blocks) b = rng.chance(0.2) ? 0 : rng.integer(1, 3);
  std::vector<int> slots(25);
  for (int i = 0; i < 25; ++i) slots[i] = i;
  rng.shuffle(slots);
  for (int c = 1; c <= 3; ++c) blocks[static_cast<std::size_t>(slots[static_cast<std::size_t>(c - 1)])] = c;
  const int sy = rng.integer(0, 5), sx = rng.integer(0, 5);
  for (std::size_t f = 0; f < reg.size(); ++f) {
    const auto idx = reg.unravel(f);
    const std::size_t by = (idx[0] + sy) / 12, bx = (idx[1] + sx) / 12;
    reg[f] = blocks[by * 5 + bx];
  }
  return {VisionGrid{render(reg, {0.95, 0.25, 0.55, 0.75}, 0.06, rng), std::nullopt}, Mask{reg}};
}

Generated lesion_segmentation_case(Rng& rng) {
  Grid<int> reg({6, 24, 24}, {2.0, 1.0, 1.0});
  paint(reg, {2.5 + rng.integer(0, 1), 12.0 + rng.integer(-2, 2), 12.0 + rng.integer(-2, 2)},
        {rng.uniform(1.5, 3.0), rng.uniform(5.0, 9.0), rng.uniform(5.0, 9.0)}, 1);
  return {VisionGrid{render(reg, {0.35, 0.7}, 0.05, rng), std::nullopt}, Mask{reg}};
}

Generated spine_case(Rng& rng) {
  Grid<int> reg({4, 40, 20}, {4.0, 1.0, 1.0});
  const int shift = rng.integer(0, 3);
  for (std::size_t f = 0; f < reg.size(); ++f) {
    const auto idx = reg.unravel(f);
    const int row = static_cast<int>(idx[1]) - shift - 1;
    if (row < 0 || idx[2] < 4 || idx[2] >= 16) continue;
    const int level = row / 9;
    if (level < 4 && row % 9 < 7) reg[f] = level + 1;
  }
  return {VisionGrid{render(reg, {0.1, 0.4, 0.5, 0.6, 0.7}, 0.04, rng), std::nullopt}, Mask{reg}};
}

const std::vector<std::string> kCaptionFindings = {
    "benign breast tissue with normal ducts and no atypia",
    "ductal carcinoma in situ with intermediate nuclear grade",
    "invasive ductal carcinoma with moderate differentiation",
    "invasive lobular carcinoma with poor differentiation and necrosis",
};

Generated caption_case(Rng& rng, int cls) {
  const auto reg = tissue_region(rng);
  const double m = 0.3 + 0.12 * cls + rng.normal(0.0, 0.03);
  std::string description = "Generate a diagnostic caption for this whole-slide image.\nCandidate findings:\n";
  for (const auto& f : kCaptionFindings) description += "- " + f + "\n";
  const std::string prefix = rng.pick(std::vector<std::string>{"", "the slide shows ", "sections show "});
  const std::string suffix = rng.pick(std::vector<std::string>{"", " in the excision specimen", " in the core biopsy"});
  VisionWithTaskDescription payload{VisionGrid{render(reg, {0.9, m}, 0.08, rng), reg}, description};
  return {payload, Caption{prefix + kCaptionFindings[static_cast<std::size_t>(cls)] + suffix}};
}

// ----------------------------------------------------------- language tasks

std::string fillers(Rng& rng, const std::vector<std::string>& pool, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += " " + rng.pick(pool);
  return s;
}

const std::vector<std::string> kPathologyFill = {
    "The specimen was received in formalin.", "Sections were stained with H&E.",
    "Immunohistochemistry was performed.",     "Margins are reported separately.",
    "The tissue is well preserved.",           "Additional levels were examined.",
};
const std::vector<std::string> kRadiologyFill = {
    "The heart size is normal.",       "No pleural effusion.",           "Bones are unremarkable.",
    "Comparison with the prior study.", "Mild degenerative changes.",     "No free fluid.",
    "The examination is of good quality.",
};

Generated origin_report(Rng& rng, int cls) {
  static const std::vector<std::string> origin = {
      "Biopsy from the lung parenchyma shows",  "Lymph node excision shows",  "Bronchial biopsy shows",
      "Liver core biopsy shows",                "Brain tissue resection shows", "Bone biopsy from the vertebra shows",
      "Soft tissue excision shows",
  };
  static const std::vector<std::string> finding = {"metastatic adenocarcinoma.", "chronic inflammation.",
                                                   "no evidence of malignancy.", "a poorly differentiated carcinoma."};
  const std::string text = origin[static_cast<std::size_t>(cls)] + " " + rng.pick(finding) + fillers(rng, kPathologyFill, 2);
  return {ReportText{text, "Classify the anatomical origin of the histopathology sample."}, ClassLabel{cls}};
}

Generated nodule_report(Rng& rng, int cls) {
  static const std::vector<std::string> lobes = {"right upper", "right lower", "left upper", "left lower", "middle"};
  std::string core = cls ? "A " + std::to_string(rng.integer(4, 20)) + " mm solid pulmonary nodule is seen in the " +
                               rng.pick(lobes) + " lobe."
                         : rng.pick(std::vector<std::string>{"No pulmonary nodules are seen.",
                                                             "The lungs are clear without nodules."});
  return {ReportText{core + fillers(rng, kRadiologyFill, 2), "Does the report describe a pulmonary nodule?"},
          ClassLabel{cls}};
}

Generated kidney_report(Rng& rng, int cls) {
  std::string core = cls ? "There is a " + std::to_string(rng.integer(1, 6)) + " cm " +
                               rng.pick(std::vector<std::string>{"cyst", "solid lesion", "hydronephrosis"}) + " in the " +
                               rng.pick(std::vector<std::string>{"left", "right"}) + " kidney."
                         : "Both kidneys are normal in size and appearance.";
  return {ReportText{core + fillers(rng, kRadiologyFill, 2), "Is a kidney abnormality reported?"}, ClassLabel{cls}};
}

std::string hip_phrase(int grade) {
  if (grade == 5) return "total hip prosthesis in place";
  if (grade == 6) return "not assessable on this projection";
  return "Kellgren-Lawrence grade " + std::to_string(grade);
}

Generated hip_report(Rng& rng, int cls) {
  const int left = rng.chance(0.5) ? cls : rng.integer(0, 6);
  const std::string text = "Right hip: " + hip_phrase(cls) + ". Left hip: " + hip_phrase(left) + "." +
                           fillers(rng, kRadiologyFill, 1);
  return {ReportText{text, "Grade both hips."}, PairedLabels{left, cls}};
}

// plan 0: every property present, 1: none present, otherwise random
Generated colon_report(Rng& rng, int plan, const std::vector<std::string>& names) {
  static const std::map<std::string, std::string> sentence = {
      {"biopsy", "Multiple biopsies were taken."},
      {"cancer", "Invasive adenocarcinoma is present."},
      {"hgd", "There is high-grade dysplasia."},
      {"hyperplastic", "A hyperplastic polyp is identified."},
      {"lgd", "Low-grade dysplasia is seen."},
      {"ni", "The sample is not informative for diagnosis."},
      {"serrated", "A sessile serrated lesion is present."},
  };
  MultiLabel label;
  std::string text;
  for (const auto& n : names) {
    const bool on = plan == 0 || (plan != 1 && rng.chance(0.35));
    label.values[n] = on ? 1.0 : 0.0;
    if (on) text += sentence.at(n) + " ";
  }
  if (text.empty()) text = "Normal colonic mucosa. ";
  text += rng.pick(kPathologyFill);
  return {ReportText{text, "Which diagnostic properties apply?"}, label};
}

Generated lesion_size_report(Rng& rng) {
  const int size = rng.integer(5, 40);
  const std::string text = "The target lesion in the " +
                           rng.pick(std::vector<std::string>{"liver", "lung", "kidney", "adrenal gland", "spleen"}) +
                           " measures " + std::to_string(size) + " mm." + fillers(rng, kRadiologyFill, 2);
  return {ReportText{text, "Report the lesion size in millimetres."}, Continuous{static_cast<double>(size)}};
}

Generated prostate_report(Rng& rng, const std::vector<std::string>& names) {
  const int volume = rng.integer(20, 100);
  const double psa = std::round(rng.uniform(1.0, 20.0) * 10.0) / 10.0;
  const double density = std::round(psa / volume * 100.0) / 100.0;
  const std::string text = "Prostate volume " + std::to_string(volume) + " ml. PSA " + format_number(psa) +
                           " ng/ml. PSA density " + format_number(density) + " ng/ml/ml." +
                           fillers(rng, kRadiologyFill, 1);
  MultiLabel label;
  label.values[names.at(0)] = volume;
  label.values[names.at(1)] = psa;
  label.values[names.at(2)] = density;
  return {ReportText{text, "Extract prostate volume, PSA and PSA density."}, label};
}

class SpanWriter {
 public:
  void text(const std::string& s) { out_ += s; }
  void entity(const std::string& s, const std::string& tag) {
    spans_.spans.push_back({out_.size(), out_.size() + s.size(), tag});
    out_ += s;
  }
  const std::string& str() const { return out_; }
  const EntitySpans& spans() const { return spans_; }

 private:
  std::string out_;
  EntitySpans spans_;
};

Generated anonymization_report(Rng& rng) {
  static const std::vector<std::string> first = {"Anna", "Peter", "Maria", "Johan", "Sofia", "Lucas", "Emma", "Daan"};
  static const std::vector<std::string> last = {"Jansen", "de Vries", "Bakker", "Visser", "Smit", "Meijer", "Mulder"};
  static const std::vector<std::string> hospital = {"Radboud University Medical Center", "Jeroen Bosch Hospital",
                                                     "Maxima Medical Center", "Rijnstate"};
  auto date = [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d-%02d-%04d", rng.integer(1, 28), rng.integer(1, 12), rng.integer(1940, 2023));
    return std::string(buf);
  };
  SpanWriter w;
  std::vector<int> order{0, 1, 2};
  rng.shuffle(order);
  for (int part : order) {
    if (!w.str().empty()) w.text(" ");
    if (part == 0) {
      w.text("Patient ");
      w.entity(rng.pick(first) + " " + rng.pick(last), "person");
      w.text(" born ");
      w.entity(date(), "date");
      w.text(".");
    } else if (part == 1) {
      w.text("Seen at ");
      w.entity(rng.pick(hospital), "location");
      w.text(" on ");
      w.entity(date(), "date");
      w.text(".");
    } else {
      w.text("Record number ");
      w.entity(std::to_string(rng.integer(10000000, 99999999)), "identifier");
      w.text(". Discussed with Dr. ");
      w.entity(rng.pick(last), "person");
      w.text(".");
    }
  }
  w.text(" " + rng.pick(kRadiologyFill));
  return {ReportText{w.str(), "Mark all protected health information."}, w.spans()};
}

// --------------------------------------------------------------- planning

enum class PlanKind { none, classes, forced_events, extremes };

struct TaskRecipe {
  PlanKind plan = PlanKind::none;
  int classes = 0;
  std::function<Generated(Rng&, int)> make;
};

TaskRecipe recipe(const TaskDefinition& t) {
  const auto names = t.params.label_names;
  switch (t.task_id) {
    case 1: return {PlanKind::classes, 6, [](Rng& r, int c) { return grade_case(r, c, 0.1); }};
    case 2: return {PlanKind::classes, 2, nodule_case};
    case 3: return {PlanKind::forced_events, 0, [](Rng& r, int c) { return recurrence_case(r, c == 1); }};
    case 4: return {PlanKind::classes, 3, proportion_case};
    case 5: return {PlanKind::none, 0, [](Rng& r, int) { return cell_case(r, 0.85); }};
    case 6: return {PlanKind::classes, 2, prostate_case};
    case 7: return {PlanKind::none, 0, [](Rng& r, int) { return lung_nodule_case(r); }};
    case 8: return {PlanKind::none, 0, [](Rng& r, int) { return cell_case(r, 0.05); }};
    case 9: return {PlanKind::none, 0, [](Rng& r, int) { return tissue_segmentation_case(r); }};
    case 10: return {PlanKind::none, 0, [](Rng& r, int) { return lesion_segmentation_case(r); }};
    case 11: return {PlanKind::none, 0, [](Rng& r, int) { return spine_case(r); }};
    case 12: return {PlanKind::classes, 7, origin_report};
    case 13: return {PlanKind::classes, 2, nodule_report};
    case 14: return {PlanKind::classes, 2, kidney_report};
    case 15: return {PlanKind::classes, 7, hip_report};
    case 16: return {PlanKind::extremes, 0, [names](Rng& r, int c) { return colon_report(r, c, names); }};
    case 17: return {PlanKind::none, 0, [](Rng& r, int) { return lesion_size_report(r); }};
    case 18: return {PlanKind::none, 0, [names](Rng& r, int) { return prostate_report(r, names); }};
    case 19: return {PlanKind::none, 0, [](Rng& r, int) { return anonymization_report(r); }};
    case 20: return {PlanKind::classes, 4, caption_case};
    default: break;
  }
  fail("config", "no synthetic generator for task " + std::to_string(t.task_id));
}

// Per-cohort plan values. Evaluation cohorts put the distinguishing cases
// first so that the five-case check cohort already satisfies the metric.
std::vector<int> cohort_plan(Rng& rng, const TaskRecipe& r, int n, bool few_shot) {
  std::vector<int> plan(static_cast<std::size_t>(n), 0);
  if (n == 0) return plan;
  const std::size_t head = std::min<std::size_t>(plan.size(), 5);
  switch (r.plan) {
    case PlanKind::none: break;
    case PlanKind::classes:
      if (few_shot) {
        for (int i = 0; i < n; ++i) plan[static_cast<std::size_t>(i)] = i % r.classes;
        rng.shuffle(plan);
      } else {
        std::vector<int> perm(static_cast<std::size_t>(r.classes));
        for (int c = 0; c < r.classes; ++c) perm[static_cast<std::size_t>(c)] = c;
        rng.shuffle(perm);
        for (int i = 0; i < n; ++i)
          plan[static_cast<std::size_t>(i)] = i < r.classes ? perm[static_cast<std::size_t>(i)] : rng.integer(0, r.classes - 1);
      }
      break;
    case PlanKind::forced_events:
      plan[0] = 1;
      if (plan.size() > 1) plan[1] = 1;
      break;
    case PlanKind::extremes:
      std::fill(plan.begin(), plan.end(), 2);
      plan[0] = 0;
      if (plan.size() > 1) plan[1] = 1;
      break;
  }
  if (r.plan != PlanKind::classes || !few_shot) {
    std::vector<int> h(plan.begin(), plan.begin() + static_cast<long>(head));
    rng.shuffle(h);
    std::copy(h.begin(), h.end(), plan.begin());
  }
  return plan;
}

std::string case_id(Rng& rng, std::set<std::string>& used) {
  static const char* hex = "0123456789abcdef";
  for (;;) {
    std::uint64_t b = rng.bits();
    std::string id = "c";
    for (int i = 0; i < 10; ++i, b >>= 4) id += hex[b & 15];
    if (used.insert(id).second) return id;
  }
}

void check_spec(const SyntheticBenchmarkSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) fail("config", "scale must be a positive number");
  if (spec.feature_dim < 17) fail("config", "feature_dim must be at least 17 (16 statistics plus one histogram bin)");
}

}  // namespace

json BenchmarkManifest::to_json() const {
  json tasks_json = json::array();
  for (const auto& t : tasks)
    tasks_json.push_back({{"task_id", t.task_id},
                          {"few_shot", t.counts.few_shot},
                          {"validation", t.counts.validation},
                          {"test", t.counts.test}});
  return {{"seed", spec.seed}, {"scale", spec.scale}, {"feature_dim", spec.feature_dim}, {"tasks", tasks_json}};
}

BenchmarkManifest BenchmarkManifest::from_json(const json& j) {
  BenchmarkManifest m;
  try {
    m.spec.seed = j.at("seed").get<std::uint64_t>();
    m.spec.scale = j.at("scale").get<double>();
    m.spec.feature_dim = j.at("feature_dim").get<int>();
    for (const auto& t : j.at("tasks"))
      m.tasks.push_back({t.at("task_id").get<int>(),
                         {t.at("few_shot").get<int>(), t.at("validation").get<int>(), t.at("test").get<int>()}});
  } catch (const json::exception& e) {
    fail("io", std::string("malformed benchmark manifest: ") + e.what());
  }
  return m;
}

CaseCounts scaled_counts(const TaskDefinition& task, double scale) {
  auto scaled = [&](int n) { return std::min(n, std::max(static_cast<int>(std::floor(n * scale)), 20)); };
  return {task.counts.few_shot, scaled(task.counts.validation), scaled(task.counts.test)};
}

BenchmarkManifest generate_benchmark(const SyntheticBenchmarkSpec& spec, const fs::path& out,
                                     const TaskRegistry& registry) {
  check_spec(spec);
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!fs::exists(out / "manifest.json")) fail("io", "refusing to overwrite non-benchmark directory " + out.string());
    fs::remove_all(out / "tasks");
    fs::remove(out / "manifest.json");
  }
  fs::create_directories(out);
  const BenchmarkLayout layout(out);

  BenchmarkManifest manifest;
  manifest.spec = spec;
  for (const auto& task : registry.all()) {
    Rng rng(splitmix(spec.seed ^ splitmix(static_cast<std::uint64_t>(task.task_id))));
    const auto r = recipe(task);
    const auto counts = scaled_counts(task, spec.scale);
    std::set<std::string> used;
    SplitAssignment splits;
    auto cohort = [&](int n, bool few_shot, std::vector<std::string>& ids) {
      for (int plan : cohort_plan(rng, r, n, few_shot)) {
        const auto id = case_id(rng, used);
        const auto g = r.make(rng, plan);
        write_payload(layout, task.task_id, id, g.payload);
        write_reference(layout, task.task_id, id, g.reference);
        ids.push_back(id);
      }
    };
    cohort(counts.few_shot, true, splits.few_shot);
    cohort(counts.validation, false, splits.validation);
    cohort(counts.test, false, splits.test);
    write_splits(layout, task.task_id, splits);
    write_config(layout, task);
    manifest.tasks.push_back({task.task_id, counts});
  }
  write_text_file(out / "manifest.json", dump_stable(manifest.to_json()));
  return manifest;
}

BenchmarkManifest load_manifest(const fs::path& benchmark_root) {
  const auto path = benchmark_root / "manifest.json";
  if (!fs::exists(path)) fail("io", "no benchmark manifest at " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    fail("io", std::string("malformed benchmark manifest: ") + e.what());
  }
  return BenchmarkManifest::from_json(j);
}

}  // namespace unicorn::harness
