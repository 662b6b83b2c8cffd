#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unicorn/core/grid.hpp"

namespace unicorn {

enum class TaskType { classification, regression, detection, segmentation, named_entity_recognition, caption_generation };
enum class Domain { pathology, radiology, mixed };
enum class Modality { vision, language, vision_language };
enum class DeliveryMode { per_case, batched };
enum class Split { few_shot, evaluation };

// Metric families used by the registered tasks.
enum class MetricSpec {
  quadratic_weighted_kappa,
  unweighted_kappa,
  pooled_pair_kappa,
  auroc,
  macro_auroc,
  censored_c_index,
  detection_f1,
  auroc_ap_average,
  froc_cpm,
  dice_multiclass,
  uls_composite,
  instance_dice,
  rsmapes,
  rsmapes_multi,
  blended_redaction_f1,
  caption_composite,
};

// Output shape a task requires from the algorithm/adaptor.
enum class OutputShape {
  class_label_per_case,
  probability_per_case,
  continuous_per_case,
  point_set,
  point_set_with_confidence,
  point_set_with_case_probability,
  segmentation_mask,
  paired_class_labels,
  multi_label_probabilities,
  multi_continuous_per_case,
  entity_spans,
  caption_text,
};

std::string_view to_string(TaskType v);
std::string_view to_string(Domain v);
std::string_view to_string(Modality v);
std::string_view to_string(Split v);
std::string_view to_string(MetricSpec v);
std::string_view to_string(OutputShape v);

TaskType parse_task_type(std::string_view s);
Domain parse_domain(std::string_view s);
Modality parse_modality(std::string_view s);
Split parse_split(std::string_view s);
MetricSpec parse_metric_spec(std::string_view s);
OutputShape parse_output_shape(std::string_view s);

struct CaseCounts {
  int few_shot = 0;
  int validation = 0;
  int test = 0;
  bool operator==(const CaseCounts&) const = default;
};

struct TimeLimits {
  int validation_minutes = 1;
  int test_minutes = 1;
  bool operator==(const TimeLimits&) const = default;
};

struct NormalizationConstants {
  double s_ref = 0.0;
  double s_max = 1.0;
  bool operator==(const NormalizationConstants&) const = default;
};

/// Parameters the metric and the validator need beyond the metric family.
struct MetricParams {
  int num_classes = 0;                  // class-label tasks: labels are 0..num_classes-1
  std::vector<int> foreground_classes;  // multiclass Dice
  std::vector<std::string> label_names; // multi-label / multi-variable outputs
  std::vector<double> epsilons;         // RSMAPES tolerance per variable
  double hit_radius = 0.0;              // fixed point-matching radius; 0 => half equivalent diameter
  bool operator==(const MetricParams&) const = default;
};

struct TaskDefinition {
  int task_id = 0;
  std::string name;
  TaskType task_type = TaskType::classification;
  Domain domain = Domain::pathology;
  Modality modality = Modality::vision;
  MetricSpec metric_spec = MetricSpec::auroc;
  std::string metric_label;  // metric column as published
  OutputShape output = OutputShape::class_label_per_case;
  CaseCounts counts;
  TimeLimits time_limit;
  NormalizationConstants norm;
  MetricParams params;

  DeliveryMode delivery() const {
    return modality == Modality::language ? DeliveryMode::batched : DeliveryMode::per_case;
  }
  bool dense() const { return task_type == TaskType::detection || task_type == TaskType::segmentation; }

  bool operator==(const TaskDefinition&) const = default;
};

// ---------------------------------------------------------------- payloads

struct VisionGrid {
  Grid<double> image;
  std::optional<Grid<int>> tissue_mask;
  bool operator==(const VisionGrid&) const = default;
};

struct ReportText {
  std::string text;
  std::string preamble;
  bool operator==(const ReportText&) const = default;
};

struct VisionWithTaskDescription {
  VisionGrid vision;
  std::string description;
  bool operator==(const VisionWithTaskDescription&) const = default;
};

using CasePayload = std::variant<VisionGrid, ReportText, VisionWithTaskDescription>;

void check_payload(const CasePayload& payload);
const VisionGrid* vision_of(const CasePayload& payload);

// ---------------------------------------------------------- representations

enum class RepresentationKind { case_level, patch_level };

struct PatchFeature {
  std::vector<long> coord;     // most-superior / top-left corner, grid index units
  std::vector<long> size;      // extent per axis, grid index units
  std::vector<double> spacing;
  std::vector<double> features;
  bool operator==(const PatchFeature&) const = default;
};

struct Representation {
  std::string case_id;
  RepresentationKind kind = RepresentationKind::case_level;
  std::vector<double> case_features;
  std::vector<PatchFeature> patches;
  bool operator==(const Representation&) const = default;

  std::size_t dimension() const;
};

/// Throws on violated representation invariants. When grid dims are given,
/// patch footprints are checked against the case grid bounds.
void check_representation(const Representation& rep, const std::vector<std::size_t>* grid_dims = nullptr);
/// All representations in one set must share the feature dimension.
void check_representation_set(const std::vector<Representation>& reps);

// ------------------------------------------------------- predictions / labels

struct ClassLabel {
  int value = 0;
  bool operator==(const ClassLabel&) const = default;
};
struct Probability {
  double value = 0.0;
  bool operator==(const Probability&) const = default;
};
struct ProbabilityVector {
  std::vector<double> values;
  bool operator==(const ProbabilityVector&) const = default;
};
struct Continuous {
  double value = 0.0;
  bool operator==(const Continuous&) const = default;
};
struct ScoredPoint {
  std::vector<double> coord;  // physical units (index * spacing)
  double confidence = 1.0;
  bool operator==(const ScoredPoint&) const = default;
};
struct PointSet {
  std::vector<ScoredPoint> points;
  std::optional<double> case_probability;  // case-level likelihood for tasks that score it
  bool operator==(const PointSet&) const = default;
};
struct Mask {
  Grid<int> grid;
  bool operator==(const Mask&) const = default;
};
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string tag;
  bool operator==(const EntitySpan&) const = default;
};
struct EntitySpans {
  std::vector<EntitySpan> spans;
  bool operator==(const EntitySpans&) const = default;
};
struct Caption {
  std::string text;
  bool operator==(const Caption&) const = default;
};
struct MultiLabel {
  std::map<std::string, double> values;
  bool operator==(const MultiLabel&) const = default;
};
struct PairedLabels {
  int left = 0;
  int right = 0;
  bool operator==(const PairedLabels&) const = default;
};

using Prediction = std::variant<ClassLabel, Probability, ProbabilityVector, Continuous, PointSet, Mask, EntitySpans,
                                Caption, MultiLabel, PairedLabels>;

struct SurvivalLabel {
  bool event = false;
  double time_years = 0.0;
  bool operator==(const SurvivalLabel&) const = default;
};
struct LesionRef {
  std::vector<double> coord;  // physical units
  double equivalent_diameter_mm = 1.0;
  bool operator==(const LesionRef&) const = default;
};
struct LesionRefs {
  std::vector<LesionRef> lesions;
  bool operator==(const LesionRefs&) const = default;
};

using ReferenceLabel = std::variant<ClassLabel, Probability, ProbabilityVector, Continuous, PointSet, Mask, EntitySpans,
                                    Caption, MultiLabel, PairedLabels, SurvivalLabel, LesionRefs>;

std::string_view variant_name(const Prediction& p);
std::string_view variant_name(const ReferenceLabel& r);

void check_reference(const ReferenceLabel& ref);

// ----------------------------------------------------------------- archive

struct ArchiveItem {
  std::string case_id;
  int task_id = 0;
  Split split = Split::evaluation;
  CasePayload payload;
  ReferenceLabel reference;
};

}  // namespace unicorn
