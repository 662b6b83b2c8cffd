#include "unicorn/core/registry.hpp"

#include <algorithm>
#include <set>

#include "unicorn/core/serialization.hpp"

namespace unicorn {
namespace {

TaskDefinition make(int id, std::string name, TaskType type, Domain domain, Modality modality, MetricSpec metric,
                    std::string metric_label, OutputShape output, CaseCounts counts, TimeLimits limits, double s_ref,
                    MetricParams params = {}) {
  TaskDefinition t;
  t.task_id = id;
  t.name = std::move(name);
  t.task_type = type;
  t.domain = domain;
  t.modality = modality;
  t.metric_spec = metric;
  t.metric_label = std::move(metric_label);
  t.output = output;
  t.counts = counts;
  t.time_limit = limits;
  t.norm = {s_ref, 1.0};
  t.params = std::move(params);
  return t;
}

MetricParams classes(int k) {
  MetricParams p;
  p.num_classes = k;
  return p;
}

std::vector<TaskDefinition> builtin_tasks() {
  using TT = TaskType;
  using D = Domain;
  using M = Modality;
  using MS = MetricSpec;
  using O = OutputShape;

  MetricParams t5;
  t5.hit_radius = 8.0;
  MetricParams t9 = classes(4);
  t9.foreground_classes = {1, 2, 3};  // tumor, stroma, other
  MetricParams t10 = classes(2);
  t10.foreground_classes = {1};
  MetricParams t12 = classes(7);
  t12.label_names = {"lung", "lymph_node", "bronchus", "liver", "brain", "bone", "other"};
  MetricParams t13 = classes(2);
  MetricParams t15 = classes(7);  // KL 0..4, prosthesis = 5, not applicable = 6
  MetricParams t16;
  // Seven binary properties; the task text also mentions "eight characteristics".
  t16.label_names = {"biopsy", "cancer", "hgd", "hyperplastic", "lgd", "ni", "serrated"};
  MetricParams t17;
  t17.epsilons = {4.0};
  MetricParams t18;
  t18.label_names = {"prostate_volume", "psa", "psa_density"};
  t18.epsilons = {4.0, 0.4, 0.04};

  return {
      make(1, "ISUP scoring in H&E prostate biopsies", TT::classification, D::pathology, M::vision,
           MS::quadratic_weighted_kappa, "Quadratic weighted kappa", O::class_label_per_case, {48, 195, 113},
           {10, 10}, 0.0, classes(6)),
      make(2, "Lung nodule malignancy in CT", TT::classification, D::radiology, M::vision, MS::auroc, "AUROC",
           O::probability_per_case, {64, 108, 533}, {5, 5}, 0.5, classes(2)),
      make(3, "Time to biochemical recurrence in H&E prostatectomies", TT::regression, D::pathology, M::vision,
           MS::censored_c_index, "Censored c-index", O::continuous_per_case, {48, 49, 521}, {25, 25}, 0.5),
      make(4, "Tumor proportion score in NSCLC IHC WSI", TT::classification, D::pathology, M::vision,
           MS::quadratic_weighted_kappa, "Quadratic weighted kappa", O::class_label_per_case, {48, 116, 474},
           {10, 10}, 0.0, classes(3)),
      make(5, "Signet ring cells in H&E ROIs of gastric cancer", TT::detection, D::pathology, M::vision,
           MS::detection_f1, "F1 score", O::point_set, {48, 79, 348}, {10, 10}, 0.0, t5),
      make(6, "Clinically significant prostate cancer in MRI", TT::detection, D::radiology, M::vision,
           MS::auroc_ap_average, "Average of AUROC and AP", O::point_set_with_case_probability, {48, 100, 400},
           {10, 10}, 0.25),
      make(7, "Lung nodule detection in thoracic CT", TT::detection, D::radiology, M::vision, MS::froc_cpm,
           "Sensitivity", O::point_set_with_confidence, {48, 83, 83}, {5, 5}, 0.0),
      make(8, "Mitotic figures in breast cancer H&E ROIs", TT::detection, D::pathology, M::vision, MS::detection_f1,
           "F1 score", O::point_set, {48, 180, 400}, {10, 10}, 0.0, t5),
      make(9, "Tumor and stroma segmentation in breast H&E", TT::segmentation, D::pathology, M::vision,
           MS::dice_multiclass, "Dice", O::segmentation_mask, {48, 24, 33}, {5, 5}, 0.2548, t9),
      make(10, "Universal lesion segmentation in CT ROIs", TT::segmentation, D::radiology, M::vision,
           MS::uls_composite, "Dice, long- and short-axis errors", O::segmentation_mask, {48, 50, 725}, {10, 10},
           0.0, t10),
      make(11, "Anatomical segmentation in lumbar spine MRI", TT::segmentation, D::radiology, M::vision,
           MS::instance_dice, "Dice", O::segmentation_mask, {48, 48, 97}, {10, 10}, 0.0),
      make(12, "Histopathology sample origin", TT::classification, D::pathology, M::language, MS::unweighted_kappa,
           "Unweighted kappa", O::class_label_per_case, {48, 215, 297}, {240, 240}, 0.0, t12),
      make(13, "Pulmonary nodule presence", TT::classification, D::radiology, M::language, MS::auroc, "AUROC",
           O::probability_per_case, {48, 300, 200}, {120, 240}, 0.5, t13),
      make(14, "Kidney abnormality", TT::classification, D::radiology, M::language, MS::auroc, "AUROC",
           O::probability_per_case, {48, 125, 183}, {120, 240}, 0.5, t13),
      make(15, "Hip Kellgren-Lawrence scoring", TT::classification, D::radiology, M::language, MS::pooled_pair_kappa,
           "Unweighted kappa", O::paired_class_labels, {32, 100, 108}, {120, 240}, 0.0, t15),
      make(16, "Colon histopathology diagnosis", TT::classification, D::pathology, M::language, MS::macro_auroc,
           "Macro AUROC", O::multi_label_probabilities, {48, 250, 500}, {120, 240}, 0.5, t16),
      make(17, "Lesion size measurements", TT::regression, D::radiology, M::language, MS::rsmapes, "RSMAPE",
           O::continuous_per_case, {48, 242, 298}, {120, 240}, 0.7580, t17),
      make(18, "Prostate volume and PSA (density)", TT::regression, D::radiology, M::language, MS::rsmapes_multi,
           "RSMAPE", O::multi_continuous_per_case, {48, 250, 500}, {120, 240}, 0.7668, t18),
      make(19, "Report anonymization", TT::named_entity_recognition, D::mixed, M::language,
           MS::blended_redaction_f1, "Weighted F1", O::entity_spans, {48, 200, 400}, {120, 240}, 0.0),
      make(20, "WSI captioning", TT::caption_generation, D::pathology, M::vision_language, MS::caption_composite,
           "BLEU-4, ROUGE-L, METEOR, CIDER, BERTscore", O::caption_text, {0, 81, 310}, {25, 25}, 0.0),
  };
}

void check_registry(const std::vector<TaskDefinition>& tasks) {
  std::set<int> ids;
  for (const auto& t : tasks) {
    if (!ids.insert(t.task_id).second) fail("config", "duplicate task id " + std::to_string(t.task_id));
    if (!(t.norm.s_max > t.norm.s_ref)) fail("config", "task " + std::to_string(t.task_id) + ": s_max must exceed s_ref");
    if (t.time_limit.validation_minutes <= 0 || t.time_limit.test_minutes <= 0)
      fail("config", "task " + std::to_string(t.task_id) + ": time limits must be positive");
    if (t.counts.few_shot < 0 || t.counts.validation < 0 || t.counts.test < 0)
      fail("config", "task " + std::to_string(t.task_id) + ": negative case count");
  }
}

}  // namespace

TaskRegistry::TaskRegistry(std::vector<TaskDefinition> tasks) : tasks_(std::move(tasks)) {
  check_registry(tasks_);
  std::sort(tasks_.begin(), tasks_.end(), [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
}

const TaskDefinition& TaskRegistry::at(int task_id) const {
  auto it = std::lower_bound(tasks_.begin(), tasks_.end(), task_id,
                             [](const TaskDefinition& t, int id) { return t.task_id < id; });
  if (it == tasks_.end() || it->task_id != task_id) fail("invalid_input", "unknown task " + std::to_string(task_id));
  return *it;
}

bool TaskRegistry::contains(int task_id) const {
  return std::any_of(tasks_.begin(), tasks_.end(), [&](const auto& t) { return t.task_id == task_id; });
}

const TaskRegistry& load_task_registry() {
  static const TaskRegistry registry(builtin_tasks());
  return registry;
}

TaskConfigDocument emit_task_config(const TaskDefinition& task) {
  return {task.task_id, task.domain, task.modality, task.task_type, task.output};
}

std::string TaskConfigDocument::to_text() const {
  json j;
  j["task_id"] = task_id;
  j["domain"] = std::string(to_string(domain));
  j["modality"] = std::string(to_string(modality));
  j["task_type"] = std::string(to_string(task_type));
  j["output"] = std::string(to_string(output));
  return dump_stable(j);
}

TaskConfigDocument TaskConfigDocument::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail("io", std::string("malformed task config: ") + e.what());
  }
  TaskConfigDocument d;
  d.task_id = j.at("task_id").get<int>();
  d.domain = parse_domain(j.at("domain").get<std::string>());
  d.modality = parse_modality(j.at("modality").get<std::string>());
  d.task_type = parse_task_type(j.at("task_type").get<std::string>());
  d.output = parse_output_shape(j.at("output").get<std::string>());
  return d;
}

std::string serialize_registry(const TaskRegistry& registry) {
  json arr = json::array();
  for (const auto& t : registry.all()) arr.push_back(to_json(t));
  return dump_stable(arr);
}

TaskRegistry parse_registry(const std::string& text) {
  std::vector<TaskDefinition> tasks;
  for (const auto& j : json::parse(text)) tasks.push_back(task_from_json(j));
  return TaskRegistry(std::move(tasks));
}

}  // namespace unicorn
