#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "unicorn/core/types.hpp"

namespace unicorn::adaptors {

enum class Strategy { knn, nearest_centroid, linear_probe, patch_knn_segmentation, patch_knn_detection };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct AdaptorSpec {
  Strategy strategy = Strategy::knn;
  // k, learning_rate, epochs, l2, peak_threshold, nms_radius
  std::map<std::string, double> hyperparams;
  std::uint64_t seed = 0;

  bool operator==(const AdaptorSpec&) const = default;

  double param(const std::string& key) const;  // value or the strategy default
  std::size_t k() const;

  std::string to_text() const;
  static AdaptorSpec parse(std::string_view text);
};

/// Spec with every applicable hyperparameter filled with its default.
AdaptorSpec default_spec(Strategy s);

struct AdaptorDescriptor {
  AdaptorSpec spec;
  std::vector<TaskType> compatible;
  RepresentationKind kind = RepresentationKind::case_level;
};

/// The five built-in strategies, in enum order.
std::vector<AdaptorDescriptor> registry_list_adaptors();

/// Per-dimension standardization fitted on few-shot features. Dimensions
/// with (near) zero spread are dropped.
struct Standardizer {
  std::size_t input_dim = 0;
  std::vector<std::size_t> keep;
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> apply(const std::vector<double>& row) const;
};

// ------------------------------------------------------------ linear probe

struct ProbeProblem {
  bool classification = true;
  std::size_t num_classes = 2;  // classification only
  std::size_t dim = 0;          // feature dim; a bias column is implicit
  std::vector<double> x;        // n x dim, row-major
  std::vector<int> labels;      // classification
  std::vector<double> targets;  // regression
  std::vector<double> weights;  // per-sample loss weight
  double l2 = 1e-4;

  std::size_t samples() const { return dim == 0 ? 0 : x.size() / dim; }
  /// Parameter count: classes x (dim + 1) or (dim + 1).
  std::size_t parameters() const { return (classification ? num_classes : 1) * (dim + 1); }
};

/// Weighted mean cross-entropy (softmax) or half squared error, plus
/// l2/2 * |w|^2 on the non-bias weights.
double probe_loss(const ProbeProblem& p, const std::vector<double>& w);
std::vector<double> probe_gradient(const ProbeProblem& p, const std::vector<double>& w);

struct ProbeTrace {
  std::vector<double> weights;
  std::vector<double> losses;  // loss before each epoch, then the final loss
};

ProbeTrace train_probe(const ProbeProblem& p, double learning_rate, std::size_t epochs);

// ------------------------------------------------------------- fit/predict

struct FittedAdaptor {
  AdaptorSpec spec;
  TaskType task_type = TaskType::classification;
  OutputShape output = OutputShape::class_label_per_case;
  std::size_t num_classes = 0;
  bool survival = false;

  Standardizer standardizer;
  std::size_t dim = 0;
  std::vector<double> features;  // standardized case or patch rows, n x dim
  std::vector<int> labels;
  std::vector<double> targets;
  std::vector<double> sample_weights;

  std::map<int, std::vector<double>> centroids;
  std::vector<double> probe_weights;
  std::vector<double> probe_losses;

  std::vector<double> patch_extent_mm;  // patch strategies: physical patch size

  std::size_t samples() const { return dim == 0 ? 0 : features.size() / dim; }
};

using FewShotExample = std::pair<Representation, ReferenceLabel>;

FittedAdaptor adaptor_fit(const AdaptorSpec& spec, const std::vector<FewShotExample>& few_shot,
                          const TaskDefinition& task);

/// Per-case class decision with the probability vector behind it.
struct ClassDecision {
  int label = 0;
  std::vector<double> probabilities;
};
ClassDecision classify(const FittedAdaptor& model, const Representation& rep);

struct GridShape {
  std::vector<std::size_t> dims;
  std::vector<double> spacing;
};

/// Predictions shaped for the task's output. Each case is predicted from
/// its own representation only. For mask outputs the grid is taken from
/// `grid_shapes` when given, otherwise from the patch extents.
std::vector<Prediction> adaptor_predict(const FittedAdaptor& model, const std::vector<Representation>& eval_reps,
                                        const TaskDefinition& task,
                                        const std::vector<GridShape>* grid_shapes = nullptr);

}  // namespace unicorn::adaptors
