#include "unicorn/core/types.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace unicorn {
namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<TaskType, 6> kTaskTypes{{
    {TaskType::classification, "classification"},
    {TaskType::regression, "regression"},
    {TaskType::detection, "detection"},
    {TaskType::segmentation, "segmentation"},
    {TaskType::named_entity_recognition, "named_entity_recognition"},
    {TaskType::caption_generation, "caption_generation"},
}};

constexpr NameTable<Domain, 3> kDomains{{
    {Domain::pathology, "pathology"},
    {Domain::radiology, "radiology"},
    {Domain::mixed, "mixed"},
}};

constexpr NameTable<Modality, 3> kModalities{{
    {Modality::vision, "vision"},
    {Modality::language, "language"},
    {Modality::vision_language, "vision_language"},
}};

constexpr NameTable<Split, 2> kSplits{{
    {Split::few_shot, "few_shot"},
    {Split::evaluation, "evaluation"},
}};

constexpr NameTable<MetricSpec, 16> kMetrics{{
    {MetricSpec::quadratic_weighted_kappa, "quadratic-weighted-kappa"},
    {MetricSpec::unweighted_kappa, "unweighted-kappa"},
    {MetricSpec::pooled_pair_kappa, "pooled-pair-kappa"},
    {MetricSpec::auroc, "auroc"},
    {MetricSpec::macro_auroc, "macro-auroc"},
    {MetricSpec::censored_c_index, "censored-c-index"},
    {MetricSpec::detection_f1, "detection-f1"},
    {MetricSpec::auroc_ap_average, "auroc-ap-average"},
    {MetricSpec::froc_cpm, "froc-cpm"},
    {MetricSpec::dice_multiclass, "dice-multiclass"},
    {MetricSpec::uls_composite, "uls-composite"},
    {MetricSpec::instance_dice, "instance-dice"},
    {MetricSpec::rsmapes, "rsmapes"},
    {MetricSpec::rsmapes_multi, "rsmapes-multi"},
    {MetricSpec::blended_redaction_f1, "blended-redaction-f1"},
    {MetricSpec::caption_composite, "caption-composite"},
}};

constexpr NameTable<OutputShape, 12> kOutputs{{
    {OutputShape::class_label_per_case, "class_label_per_case"},
    {OutputShape::probability_per_case, "probability_per_case"},
    {OutputShape::continuous_per_case, "continuous_per_case"},
    {OutputShape::point_set, "point_set"},
    {OutputShape::point_set_with_confidence, "point_set_with_confidence"},
    {OutputShape::point_set_with_case_probability, "point_set_with_confidence+case_probability"},
    {OutputShape::segmentation_mask, "segmentation_mask"},
    {OutputShape::paired_class_labels, "paired_class_labels_per_case"},
    {OutputShape::multi_label_probabilities, "multi_label_probabilities_per_case"},
    {OutputShape::multi_continuous_per_case, "multi_continuous_per_case"},
    {OutputShape::entity_spans, "entity_spans"},
    {OutputShape::caption_text, "caption_text"},
}};

template <typename E, std::size_t N>
std::string_view lookup(const NameTable<E, N>& table, E v) {
  for (const auto& [e, name] : table)
    if (e == v) return name;
  return "unknown";
}

template <typename E, std::size_t N>
E reverse_lookup(const NameTable<E, N>& table, std::string_view s, const char* what) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  fail("invalid_input", std::string("unknown ") + what + " '" + std::string(s) + "'");
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::string_view to_string(TaskType v) { return lookup(kTaskTypes, v); }
std::string_view to_string(Domain v) { return lookup(kDomains, v); }
std::string_view to_string(Modality v) { return lookup(kModalities, v); }
std::string_view to_string(Split v) { return lookup(kSplits, v); }
std::string_view to_string(MetricSpec v) { return lookup(kMetrics, v); }
std::string_view to_string(OutputShape v) { return lookup(kOutputs, v); }

TaskType parse_task_type(std::string_view s) { return reverse_lookup(kTaskTypes, s, "task type"); }
Domain parse_domain(std::string_view s) { return reverse_lookup(kDomains, s, "domain"); }
Modality parse_modality(std::string_view s) { return reverse_lookup(kModalities, s, "modality"); }
Split parse_split(std::string_view s) { return reverse_lookup(kSplits, s, "split"); }
MetricSpec parse_metric_spec(std::string_view s) { return reverse_lookup(kMetrics, s, "metric"); }
OutputShape parse_output_shape(std::string_view s) { return reverse_lookup(kOutputs, s, "output shape"); }

void check_payload(const CasePayload& payload) {
  auto check_vision = [](const VisionGrid& v) {
    check_grid(v.image, "payload image");
    if (v.tissue_mask) {
      check_grid(*v.tissue_mask, "tissue mask");
      if (v.tissue_mask->dims != v.image.dims) fail("invalid_input", "tissue mask dimensions differ from grid");
    }
  };
  if (const auto* v = std::get_if<VisionGrid>(&payload)) {
    check_vision(*v);
  } else if (const auto* r = std::get_if<ReportText>(&payload)) {
    if (r->text.empty()) fail("invalid_input", "report text is empty");
  } else {
    check_vision(std::get<VisionWithTaskDescription>(payload).vision);
  }
}

const VisionGrid* vision_of(const CasePayload& payload) {
  if (const auto* v = std::get_if<VisionGrid>(&payload)) return v;
  if (const auto* vt = std::get_if<VisionWithTaskDescription>(&payload)) return &vt->vision;
  return nullptr;
}

std::size_t Representation::dimension() const {
  if (kind == RepresentationKind::case_level) return case_features.size();
  return patches.empty() ? 0 : patches.front().features.size();
}

void check_representation(const Representation& rep, const std::vector<std::size_t>* grid_dims) {
  if (rep.kind == RepresentationKind::case_level) {
    if (rep.case_features.empty()) fail("invalid_input", "case-level representation without features");
    if (!rep.patches.empty()) fail("invalid_input", "case-level representation carries patches");
    if (!finite_all(rep.case_features)) fail("invalid_input", "non-finite feature value");
    return;
  }
  if (rep.patches.empty()) fail("invalid_input", "patch-level representation without patches");
  const std::size_t d = rep.patches.front().features.size();
  if (d == 0) fail("invalid_input", "patch feature vector is empty");
  for (const auto& p : rep.patches) {
    if (p.features.size() != d) fail("invalid_input", "patch feature dimensions differ");
    if (!finite_all(p.features)) fail("invalid_input", "non-finite feature value");
    const std::size_t r = p.coord.size();
    if (p.size.size() != r || p.spacing.size() != r) fail("invalid_input", "patch coord/size/spacing rank mismatch");
    for (std::size_t a = 0; a < r; ++a) {
      if (p.size[a] <= 0) fail("invalid_input", "patch size must be positive");
      if (!(p.spacing[a] > 0.0)) fail("invalid_input", "patch spacing must be positive");
      if (p.coord[a] < 0) fail("invalid_input", "patch outside case grid");
    }
    if (grid_dims) {
      if (grid_dims->size() != r) fail("invalid_input", "patch rank differs from case grid rank");
      for (std::size_t a = 0; a < r; ++a)
        if (static_cast<std::size_t>(p.coord[a] + p.size[a]) > (*grid_dims)[a])
          fail("invalid_input", "patch outside case grid");
    }
  }
}

void check_representation_set(const std::vector<Representation>& reps) {
  if (reps.empty()) return;
  const std::size_t d = reps.front().dimension();
  const auto kind = reps.front().kind;
  for (const auto& r : reps) {
    check_representation(r);
    if (r.kind != kind) fail("invalid_input", "mixed representation kinds in one set");
    if (r.dimension() != d) fail("invalid_input", "feature dimension differs within representation set");
  }
}

namespace {
constexpr std::array<std::string_view, 12> kVariantNames{
    "class_label", "probability",  "probability_vector", "continuous",     "point_set",      "mask",
    "entity_spans", "caption",     "multi_label",        "paired_labels",  "survival_label", "lesion_refs"};
}

std::string_view variant_name(const Prediction& p) { return kVariantNames[p.index()]; }
std::string_view variant_name(const ReferenceLabel& r) { return kVariantNames[r.index()]; }

void check_reference(const ReferenceLabel& ref) {
  if (const auto* s = std::get_if<SurvivalLabel>(&ref)) {
    if (!(s->time_years >= 0.0) || !std::isfinite(s->time_years)) fail("invalid_input", "survival time must be >= 0");
  } else if (const auto* l = std::get_if<LesionRefs>(&ref)) {
    for (const auto& les : l->lesions)
      if (!(les.equivalent_diameter_mm > 0.0)) fail("invalid_input", "equivalent diameter must be > 0");
  }
}

}  // namespace unicorn
