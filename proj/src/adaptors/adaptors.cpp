#include "unicorn/adaptors/adaptors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "unicorn/core/error.hpp"
#include "unicorn/kernels/kernels.hpp"

namespace unicorn::adaptors {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 5> kStrategyNames{"knn", "nearest_centroid", "linear_probe",
                                                         "patch_knn_segmentation", "patch_knn_detection"};

std::vector<std::string> allowed_params(Strategy s) {
  switch (s) {
    case Strategy::knn: return {"k"};
    case Strategy::nearest_centroid: return {};
    case Strategy::linear_probe: return {"epochs", "l2", "learning_rate"};
    case Strategy::patch_knn_segmentation: return {"k"};
    case Strategy::patch_knn_detection: return {"k", "nms_radius", "peak_threshold"};
  }
  return {};
}

double builtin_default(const std::string& key) {
  if (key == "k") return 5;
  if (key == "learning_rate") return 0.05;
  if (key == "epochs") return 200;
  if (key == "l2") return 1e-4;
  if (key == "peak_threshold") return 0.5;
  return 0.0;  // nms_radius: 0 selects the patch size
}

void check_spec(const AdaptorSpec& spec) {
  const auto allowed = allowed_params(spec.strategy);
  for (const auto& [key, value] : spec.hyperparams) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail("config", "hyperparameter '" + key + "' does not apply to " + std::string(to_string(spec.strategy)));
    if (!std::isfinite(value)) fail("config", "hyperparameter '" + key + "' is not finite");
    if (key == "l2" || key == "nms_radius") {
      if (value < 0.0) fail("config", "hyperparameter '" + key + "' must be >= 0");
    } else if (!(value > 0.0)) {
      fail("config", "hyperparameter '" + key + "' must be positive");
    }
    if ((key == "k" || key == "epochs") && value != std::floor(value))
      fail("config", "hyperparameter '" + key + "' must be an integer");
  }
}

bool compatible(Strategy s, TaskType t) {
  switch (s) {
    case Strategy::knn:
    case Strategy::linear_probe: return t == TaskType::classification || t == TaskType::regression;
    case Strategy::nearest_centroid: return t == TaskType::classification;
    case Strategy::patch_knn_segmentation: return t == TaskType::segmentation;
    case Strategy::patch_knn_detection: return t == TaskType::detection;
  }
  return false;
}

bool patch_strategy(Strategy s) {
  return s == Strategy::patch_knn_segmentation || s == Strategy::patch_knn_detection;
}

// Indices of the k nearest rows (distance, then index).
std::vector<std::size_t> nearest(const double* sq_dists, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
    return sq_dists[a] < sq_dists[b] || (sq_dists[a] == sq_dists[b] && a < b);
  });
  idx.resize(k);
  return idx;
}

std::vector<double> distances_to_fit(const FittedAdaptor& m, const std::vector<double>& queries) {
  const std::size_t nq = queries.size() / std::max<std::size_t>(m.dim, 1);
  std::vector<double> out(nq * m.samples());
  kernels::pairwise_sq_distances(queries, m.features, m.dim, out);
  return out;
}

std::vector<double> standardized_rows(const FittedAdaptor& m, const std::vector<const std::vector<double>*>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * m.dim);
  for (const auto* r : rows) {
    const auto z = m.standardizer.apply(*r);
    flat.insert(flat.end(), z.begin(), z.end());
  }
  return flat;
}

ClassDecision vote(const FittedAdaptor& m, const double* sq, std::size_t k) {
  ClassDecision d;
  d.probabilities.assign(m.num_classes, 0.0);
  for (std::size_t i : nearest(sq, m.samples(), k)) d.probabilities[static_cast<std::size_t>(m.labels[i])] += 1.0;
  for (double& p : d.probabilities) p /= static_cast<double>(k);
  d.label = static_cast<int>(std::max_element(d.probabilities.begin(), d.probabilities.end()) - d.probabilities.begin());
  return d;
}

double weighted_target(const FittedAdaptor& m, const double* sq, std::size_t k) {
  double num = 0.0, den = 0.0;
  for (std::size_t i : nearest(sq, m.samples(), k)) {
    const double w = m.sample_weights[i] / (std::sqrt(sq[i]) + 1e-9);
    num += w * m.targets[i];
    den += w;
  }
  return num / den;
}

std::vector<double> softmax(std::vector<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : z) v /= s;
  return z;
}

std::vector<double> probe_logits(const ProbeProblem& p, const std::vector<double>& w, const double* x) {
  const std::size_t rows = p.classification ? p.num_classes : 1;
  std::vector<double> z(rows, 0.0);
  for (std::size_t c = 0; c < rows; ++c) {
    const double* wc = w.data() + c * (p.dim + 1);
    double acc = wc[p.dim];
    for (std::size_t j = 0; j < p.dim; ++j) acc += wc[j] * x[j];
    z[c] = acc;
  }
  return z;
}

double weight_sum(const ProbeProblem& p) {
  double s = 0.0;
  for (double w : p.weights) s += w;
  if (!(s > 0.0)) fail("invalid_input", "probe: sample weights sum to zero");
  return s;
}

void check_problem(const ProbeProblem& p, const std::vector<double>& w) {
  const std::size_t n = p.samples();
  if (n == 0) fail("invalid_input", "probe: no samples");
  if (p.x.size() != n * p.dim) fail("invalid_input", "probe: feature matrix shape");
  if (p.weights.size() != n) fail("invalid_input", "probe: weight count");
  if (p.classification ? p.labels.size() != n : p.targets.size() != n) fail("invalid_input", "probe: target count");
  if (w.size() != p.parameters()) fail("invalid_input", "probe: parameter count");
}

// Largest eigenvalue of the weighted second-moment matrix of [x, 1].
double lipschitz_estimate(const ProbeProblem& p) {
  const std::size_t d = p.dim + 1, n = p.samples();
  const double wsum = weight_sum(p);
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), next(d);
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = p.x.data() + i * p.dim;
      double proj = v[p.dim];
      for (std::size_t j = 0; j < p.dim; ++j) proj += x[j] * v[j];
      proj *= p.weights[i] / wsum;
      for (std::size_t j = 0; j < p.dim; ++j) next[j] += proj * x[j];
      next[p.dim] += proj;
    }
    double norm = 0.0;
    for (double a : next) norm += a * a;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    lambda = norm;
    for (std::size_t j = 0; j < d; ++j) v[j] = next[j] / norm;
  }
  return lambda + p.l2;
}

Grid<int> mask_template(const Representation& rep, const GridShape* shape) {
  const auto& first = rep.patches.front();
  std::vector<std::size_t> dims(first.coord.size(), 0);
  std::vector<double> spacing = first.spacing;
  if (shape) {
    dims = shape->dims;
    spacing = shape->spacing;
  } else {
    for (const auto& p : rep.patches)
      for (std::size_t a = 0; a < dims.size(); ++a)
        dims[a] = std::max(dims[a], static_cast<std::size_t>(p.coord[a] + p.size[a]));
  }
  return Grid<int>(dims, spacing, 0);
}

// Visits every grid index covered by a patch (clipped to the grid).
template <typename F>
void for_footprint(const PatchFeature& p, const std::vector<std::size_t>& dims, F&& f) {
  const std::size_t r = dims.size();
  if (p.coord.size() != r) fail("invalid_input", "patch rank differs from grid rank");
  std::vector<std::size_t> lo(r), hi(r), idx(r);
  for (std::size_t a = 0; a < r; ++a) {
    lo[a] = static_cast<std::size_t>(p.coord[a]);
    hi[a] = std::min(dims[a], static_cast<std::size_t>(p.coord[a] + p.size[a]));
    if (lo[a] >= hi[a]) return;
  }
  idx = lo;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < r; ++a) flat = flat * dims[a] + idx[a];
    f(flat);
    std::size_t a = r;
    while (a-- > 0) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
}

std::vector<double> patch_center_mm(const PatchFeature& p) {
  std::vector<double> c(p.coord.size());
  for (std::size_t a = 0; a < c.size(); ++a)
    c[a] = (static_cast<double>(p.coord[a]) + static_cast<double>(p.size[a] - 1) / 2.0) * p.spacing[a];
  return c;
}

bool patch_contains(const PatchFeature& p, const std::vector<double>& point_mm) {
  if (point_mm.size() != p.coord.size()) fail("invalid_input", "lesion dimensionality differs from patch rank");
  for (std::size_t a = 0; a < point_mm.size(); ++a) {
    const double lo = static_cast<double>(p.coord[a]) * p.spacing[a];
    const double hi = static_cast<double>(p.coord[a] + p.size[a]) * p.spacing[a];
    if (point_mm[a] < lo || point_mm[a] >= hi) return false;
  }
  return true;
}

int majority_label(const PatchFeature& p, const Grid<int>& mask) {
  std::map<int, std::size_t> counts;
  for_footprint(p, mask.dims, [&](std::size_t flat) { ++counts[mask.values[flat]]; });
  int best = 0;
  std::size_t best_n = 0;
  for (const auto& [label, n] : counts)
    if (n > best_n) {
      best = label;
      best_n = n;
    }
  return best;
}

std::vector<std::vector<double>> lesion_points(const ReferenceLabel& ref) {
  std::vector<std::vector<double>> pts;
  if (const auto* l = std::get_if<LesionRefs>(&ref)) {
    for (const auto& les : l->lesions) pts.push_back(les.coord);
  } else if (const auto* ps = std::get_if<PointSet>(&ref)) {
    for (const auto& p : ps->points) pts.push_back(p.coord);
  } else {
    fail("invalid_input", "detection few-shot reference must be lesion_refs or point_set");
  }
  return pts;
}

void fit_case_level(FittedAdaptor& m, const std::vector<FewShotExample>& few_shot, const TaskDefinition& task) {
  std::vector<std::vector<double>> rows;
  for (const auto& [rep, ref] : few_shot) {
    rows.push_back(rep.case_features);
    if (task.task_type == TaskType::classification) {
      const auto* c = std::get_if<ClassLabel>(&ref);
      if (!c) fail("invalid_input", "classification few-shot reference must be a class label");
      if (c->value < 0) fail("invalid_input", "negative class label");
      m.labels.push_back(c->value);
    } else if (const auto* s = std::get_if<SurvivalLabel>(&ref)) {
      m.survival = true;
      m.targets.push_back(-s->time_years);
      m.sample_weights.push_back(s->event ? 1.0 : 0.5);
    } else if (const auto* v = std::get_if<Continuous>(&ref)) {
      m.targets.push_back(v->value);
      m.sample_weights.push_back(1.0);
    } else {
      fail("invalid_input", "regression few-shot reference must be continuous or survival");
    }
  }
  if (m.survival && m.targets.size() != few_shot.size()) fail("invalid_input", "mixed survival and continuous labels");
  if (m.task_type == TaskType::classification) {
    const int mx = *std::max_element(m.labels.begin(), m.labels.end());
    m.num_classes = task.params.num_classes > 0 ? static_cast<std::size_t>(task.params.num_classes)
                                                : static_cast<std::size_t>(std::max(mx + 1, 2));
    if (static_cast<std::size_t>(mx) >= m.num_classes) fail("invalid_input", "few-shot label outside task range");
    m.sample_weights.assign(m.labels.size(), 1.0);
  }
  m.standardizer = Standardizer::fit(rows);
  m.dim = m.standardizer.keep.size();
  for (const auto& r : rows) {
    const auto z = m.standardizer.apply(r);
    m.features.insert(m.features.end(), z.begin(), z.end());
  }
}

void fit_patch_level(FittedAdaptor& m, const std::vector<FewShotExample>& few_shot) {
  std::vector<std::vector<double>> rows;
  for (const auto& [rep, ref] : few_shot) {
    if (m.spec.strategy == Strategy::patch_knn_segmentation) {
      const auto* mask = std::get_if<Mask>(&ref);
      if (!mask) fail("invalid_input", "segmentation few-shot reference must be a mask");
      for (const auto& p : rep.patches) {
        rows.push_back(p.features);
        m.labels.push_back(majority_label(p, mask->grid));
      }
    } else {
      const auto pts = lesion_points(ref);
      for (const auto& p : rep.patches) {
        rows.push_back(p.features);
        const bool pos = std::any_of(pts.begin(), pts.end(), [&](const auto& q) { return patch_contains(p, q); });
        m.labels.push_back(pos ? 1 : 0);
      }
    }
  }
  const auto& p0 = few_shot.front().first.patches.front();
  for (std::size_t a = 0; a < p0.size.size(); ++a)
    m.patch_extent_mm.push_back(static_cast<double>(p0.size[a]) * p0.spacing[a]);
  const int mx = *std::max_element(m.labels.begin(), m.labels.end());
  m.num_classes = static_cast<std::size_t>(std::max(mx + 1, 2));
  m.sample_weights.assign(m.labels.size(), 1.0);
  m.standardizer = Standardizer::fit(rows);
  m.dim = m.standardizer.keep.size();
  for (const auto& r : rows) {
    const auto z = m.standardizer.apply(r);
    m.features.insert(m.features.end(), z.begin(), z.end());
  }
}

void fit_probe(FittedAdaptor& m) {
  ProbeProblem p;
  p.classification = m.task_type == TaskType::classification;
  p.num_classes = m.num_classes;
  p.dim = m.dim;
  p.x = m.features;
  p.labels = m.labels;
  p.targets = m.targets;
  p.weights = m.sample_weights;
  p.l2 = m.spec.param("l2");
  const auto trace = train_probe(p, m.spec.param("learning_rate"), static_cast<std::size_t>(m.spec.param("epochs")));
  m.probe_weights = trace.weights;
  m.probe_losses = trace.losses;
}

ProbeProblem probe_shape(const FittedAdaptor& m) {
  ProbeProblem p;
  p.classification = m.task_type == TaskType::classification;
  p.num_classes = m.num_classes;
  p.dim = m.dim;
  return p;
}

ClassDecision classify_row(const FittedAdaptor& m, const double* z, const double* sq) {
  switch (m.spec.strategy) {
    case Strategy::knn: return vote(m, sq, m.spec.k());
    case Strategy::nearest_centroid: {
      ClassDecision d;
      std::vector<double> neg_dist;
      std::vector<int> present;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [label, c] : m.centroids) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.dim; ++j) acc += (z[j] - c[j]) * (z[j] - c[j]);
        const double dist = std::sqrt(acc);
        if (dist < best) {
          best = dist;
          d.label = label;
        }
        neg_dist.push_back(-dist);
        present.push_back(label);
      }
      const auto p = softmax(neg_dist);
      d.probabilities.assign(m.num_classes, 0.0);
      for (std::size_t i = 0; i < present.size(); ++i) d.probabilities[static_cast<std::size_t>(present[i])] = p[i];
      return d;
    }
    case Strategy::linear_probe: {
      ClassDecision d;
      d.probabilities = softmax(probe_logits(probe_shape(m), m.probe_weights, z));
      d.label = static_cast<int>(std::max_element(d.probabilities.begin(), d.probabilities.end()) -
                                 d.probabilities.begin());
      return d;
    }
    default: fail("config", "strategy does not classify cases");
  }
}

double regress_row(const FittedAdaptor& m, const double* z, const double* sq) {
  if (m.spec.strategy == Strategy::knn) return weighted_target(m, sq, m.spec.k());
  if (m.spec.strategy == Strategy::linear_probe) return probe_logits(probe_shape(m), m.probe_weights, z).front();
  fail("config", "strategy does not regress");
}

Prediction shape_class(const ClassDecision& d, OutputShape out) {
  if (out == OutputShape::class_label_per_case) return ClassLabel{d.label};
  if (out == OutputShape::probability_per_case) {
    if (d.probabilities.size() != 2) fail("config", "probability output needs a binary task");
    return Probability{d.probabilities[1]};
  }
  fail("config", "classification adaptor cannot produce " + std::string(to_string(out)));
}

std::vector<Prediction> predict_dense(const FittedAdaptor& m, const std::vector<Representation>& reps,
                                      const TaskDefinition& task, const std::vector<GridShape>* shapes) {
  std::vector<Prediction> out;
  const std::size_t k = m.spec.k();
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const auto& rep = reps[c];
    std::vector<const std::vector<double>*> rows;
    for (const auto& p : rep.patches) rows.push_back(&p.features);
    const auto z = standardized_rows(m, rows);
    const auto sq = distances_to_fit(m, z);
    const std::size_t n = m.samples();

    if (m.spec.strategy == Strategy::patch_knn_segmentation) {
      Grid<int> mask = mask_template(rep, shapes ? &(*shapes)[c] : nullptr);
      for (std::size_t i = 0; i < rep.patches.size(); ++i) {
        const int label = vote(m, sq.data() + i * n, k).label;
        for_footprint(rep.patches[i], mask.dims, [&](std::size_t flat) { mask.values[flat] = label; });
      }
      out.emplace_back(Mask{std::move(mask)});
      continue;
    }

    std::vector<double> score(rep.patches.size());
    for (std::size_t i = 0; i < rep.patches.size(); ++i) {
      const auto d = vote(m, sq.data() + i * n, k);
      score[i] = d.probabilities.size() > 1 ? d.probabilities[1] : 0.0;
    }
    double radius = m.spec.param("nms_radius");
    if (radius == 0.0) radius = *std::max_element(m.patch_extent_mm.begin(), m.patch_extent_mm.end());
    const double threshold = m.spec.param("peak_threshold");
    std::vector<std::size_t> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    PointSet ps;
    std::vector<std::vector<double>> kept;
    for (std::size_t i : order) {
      if (!(score[i] > threshold)) break;
      const auto centre = patch_center_mm(rep.patches[i]);
      bool suppressed = false;
      for (const auto& q : kept) {
        double acc = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a) acc += (q[a] - centre[a]) * (q[a] - centre[a]);
        if (acc <= radius * radius) {
          suppressed = true;
          break;
        }
      }
      if (suppressed) continue;
      kept.push_back(centre);
      ps.points.push_back({centre, score[i]});
    }
    if (task.output == OutputShape::point_set_with_case_probability)
      ps.case_probability = score.empty() ? 0.0 : *std::max_element(score.begin(), score.end());
    out.emplace_back(std::move(ps));
  }
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

Strategy parse_strategy(std::string_view s) {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i)
    if (kStrategyNames[i] == s) return static_cast<Strategy>(i);
  fail("config", "unknown adaptor strategy '" + std::string(s) + "'");
}

double AdaptorSpec::param(const std::string& key) const {
  const auto it = hyperparams.find(key);
  return it != hyperparams.end() ? it->second : builtin_default(key);
}

std::size_t AdaptorSpec::k() const { return static_cast<std::size_t>(param("k")); }

std::string AdaptorSpec::to_text() const {
  json j;
  j["strategy"] = std::string(to_string(strategy));
  j["hyperparams"] = hyperparams;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

AdaptorSpec AdaptorSpec::parse(std::string_view text) {
  AdaptorSpec s;
  try {
    const auto j = json::parse(text);
    s.strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (j.contains("hyperparams")) s.hyperparams = j.at("hyperparams").get<std::map<std::string, double>>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail("config", std::string("malformed adaptor spec: ") + e.what());
  }
  check_spec(s);
  return s;
}

AdaptorSpec default_spec(Strategy s) {
  AdaptorSpec spec;
  spec.strategy = s;
  for (const auto& key : allowed_params(s))
    if (key != "nms_radius") spec.hyperparams[key] = builtin_default(key);
  return spec;
}

std::vector<AdaptorDescriptor> registry_list_adaptors() {
  std::vector<AdaptorDescriptor> out;
  const std::array<TaskType, 6> all{TaskType::classification, TaskType::regression, TaskType::detection,
                                    TaskType::segmentation, TaskType::named_entity_recognition,
                                    TaskType::caption_generation};
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    const auto s = static_cast<Strategy>(i);
    AdaptorDescriptor d;
    d.spec = default_spec(s);
    for (auto t : all)
      if (compatible(s, t)) d.compatible.push_back(t);
    d.kind = patch_strategy(s) ? RepresentationKind::patch_level : RepresentationKind::case_level;
    out.push_back(std::move(d));
  }
  return out;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) fail("invalid_input", "no rows to standardize");
  Standardizer s;
  s.input_dim = rows.front().size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(s.input_dim, 0.0), var(s.input_dim, 0.0);
  for (const auto& r : rows) {
    if (r.size() != s.input_dim) fail("invalid_input", "feature dimension differs within few-shot set");
    for (std::size_t j = 0; j < s.input_dim; ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < s.input_dim; ++j) var[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (std::size_t j = 0; j < s.input_dim; ++j) {
    const double sd = std::sqrt(var[j] / n);
    if (sd == 0.0 || sd <= 1e-12 * std::abs(mean[j])) continue;
    s.keep.push_back(j);
    s.mean.push_back(mean[j]);
    s.scale.push_back(sd);
  }
  if (s.keep.empty()) {
    // Every dimension is constant: keep them all unscaled so distances are zero.
    for (std::size_t j = 0; j < s.input_dim; ++j) {
      s.keep.push_back(j);
      s.mean.push_back(mean[j]);
      s.scale.push_back(1.0);
    }
  }
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& row) const {
  if (row.size() != input_dim)
    fail("invalid_input", "feature dimension mismatch: expected " + std::to_string(input_dim) + ", got " +
                              std::to_string(row.size()));
  std::vector<double> z(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) z[i] = (row[keep[i]] - mean[i]) / scale[i];
  return z;
}

double probe_loss(const ProbeProblem& p, const std::vector<double>& w) {
  check_problem(p, w);
  const double wsum = weight_sum(p);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.samples(); ++i) {
    const auto z = probe_logits(p, w, p.x.data() + i * p.dim);
    double term;
    if (p.classification) {
      const double mx = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (double v : z) s += std::exp(v - mx);
      term = mx + std::log(s) - z[static_cast<std::size_t>(p.labels[i])];
    } else {
      const double r = z.front() - p.targets[i];
      term = 0.5 * r * r;
    }
    loss += p.weights[i] * term;
  }
  loss /= wsum;
  const std::size_t rows = p.classification ? p.num_classes : 1;
  double reg = 0.0;
  for (std::size_t c = 0; c < rows; ++c)
    for (std::size_t j = 0; j < p.dim; ++j) reg += w[c * (p.dim + 1) + j] * w[c * (p.dim + 1) + j];
  return loss + 0.5 * p.l2 * reg;
}

std::vector<double> probe_gradient(const ProbeProblem& p, const std::vector<double>& w) {
  check_problem(p, w);
  const double wsum = weight_sum(p);
  const std::size_t rows = p.classification ? p.num_classes : 1;
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t i = 0; i < p.samples(); ++i) {
    const double* x = p.x.data() + i * p.dim;
    std::vector<double> resid;
    if (p.classification) {
      resid = softmax(probe_logits(p, w, x));
      resid[static_cast<std::size_t>(p.labels[i])] -= 1.0;
    } else {
      resid = {probe_logits(p, w, x).front() - p.targets[i]};
    }
    const double scale = p.weights[i] / wsum;
    for (std::size_t c = 0; c < rows; ++c) {
      double* gc = g.data() + c * (p.dim + 1);
      const double r = scale * resid[c];
      for (std::size_t j = 0; j < p.dim; ++j) gc[j] += r * x[j];
      gc[p.dim] += r;
    }
  }
  for (std::size_t c = 0; c < rows; ++c)
    for (std::size_t j = 0; j < p.dim; ++j) g[c * (p.dim + 1) + j] += p.l2 * w[c * (p.dim + 1) + j];
  return g;
}

ProbeTrace train_probe(const ProbeProblem& p, double learning_rate, std::size_t epochs) {
  if (!(learning_rate > 0.0)) fail("config", "probe learning rate must be positive");
  if (p.classification)
    for (int l : p.labels)
      if (l < 0 || static_cast<std::size_t>(l) >= p.num_classes) fail("invalid_input", "probe label out of range");
  ProbeTrace t;
  t.weights.assign(p.parameters(), 0.0);
  const double step = learning_rate / std::max(1.0, lipschitz_estimate(p));
  for (std::size_t e = 0; e < epochs; ++e) {
    t.losses.push_back(probe_loss(p, t.weights));
    const auto g = probe_gradient(p, t.weights);
    for (std::size_t i = 0; i < g.size(); ++i) t.weights[i] -= step * g[i];
  }
  t.losses.push_back(probe_loss(p, t.weights));
  return t;
}

FittedAdaptor adaptor_fit(const AdaptorSpec& spec, const std::vector<FewShotExample>& few_shot,
                          const TaskDefinition& task) {
  check_spec(spec);
  if (few_shot.empty()) fail("invalid_input", "few-shot set is empty");
  if (!compatible(spec.strategy, task.task_type))
    fail("config", std::string(to_string(spec.strategy)) + " is incompatible with task type " +
                       std::string(to_string(task.task_type)));
  const auto want = patch_strategy(spec.strategy) ? RepresentationKind::patch_level : RepresentationKind::case_level;
  std::vector<Representation> reps;
  for (const auto& ex : few_shot) {
    if (ex.first.kind != want) fail("invalid_input", "incompatible representation kind");
    reps.push_back(ex.first);
  }
  check_representation_set(reps);

  FittedAdaptor m;
  m.spec = spec;
  m.task_type = task.task_type;
  m.output = task.output;
  if (patch_strategy(spec.strategy)) fit_patch_level(m, few_shot);
  else fit_case_level(m, few_shot, task);

  if (spec.strategy == Strategy::knn || patch_strategy(spec.strategy)) {
    if (spec.k() > m.samples())
      fail("invalid_input", "k = " + std::to_string(spec.k()) + " exceeds the " + std::to_string(m.samples()) +
                                " few-shot samples");
  } else if (spec.strategy == Strategy::nearest_centroid) {
    std::map<int, std::size_t> counts;
    for (std::size_t i = 0; i < m.samples(); ++i) {
      auto& c = m.centroids[m.labels[i]];
      c.resize(m.dim, 0.0);
      for (std::size_t j = 0; j < m.dim; ++j) c[j] += m.features[i * m.dim + j];
      ++counts[m.labels[i]];
    }
    for (auto& [label, c] : m.centroids)
      for (double& v : c) v /= static_cast<double>(counts[label]);
  } else {
    fit_probe(m);
  }
  return m;
}

ClassDecision classify(const FittedAdaptor& model, const Representation& rep) {
  if (model.task_type != TaskType::classification) fail("config", "adaptor was not fitted for classification");
  const auto z = model.standardizer.apply(rep.case_features);
  std::vector<double> sq;
  if (model.spec.strategy == Strategy::knn) sq = distances_to_fit(model, z);
  return classify_row(model, z.data(), sq.data());
}

std::vector<Prediction> adaptor_predict(const FittedAdaptor& model, const std::vector<Representation>& eval_reps,
                                        const TaskDefinition& task, const std::vector<GridShape>* grid_shapes) {
  if (grid_shapes && grid_shapes->size() != eval_reps.size()) fail("invalid_input", "grid shape count mismatch");
  const auto want =
      patch_strategy(model.spec.strategy) ? RepresentationKind::patch_level : RepresentationKind::case_level;
  for (const auto& r : eval_reps) {
    if (r.kind != want) fail("invalid_input", "incompatible representation kind");
    check_representation(r);
  }
  if (patch_strategy(model.spec.strategy)) return predict_dense(model, eval_reps, task, grid_shapes);

  std::vector<const std::vector<double>*> rows;
  for (const auto& r : eval_reps) rows.push_back(&r.case_features);
  const auto z = standardized_rows(model, rows);
  std::vector<double> sq;
  if (model.spec.strategy == Strategy::knn) sq = distances_to_fit(model, z);
  const std::size_t n = model.samples();

  std::vector<Prediction> out;
  for (std::size_t i = 0; i < eval_reps.size(); ++i) {
    const double* zi = z.data() + i * model.dim;
    const double* si = sq.empty() ? nullptr : sq.data() + i * n;
    if (model.task_type == TaskType::classification) {
      out.push_back(shape_class(classify_row(model, zi, si), task.output));
    } else {
      if (task.output != OutputShape::continuous_per_case)
        fail("config", "regression adaptor cannot produce " + std::string(to_string(task.output)));
      out.emplace_back(Continuous{regress_row(model, zi, si)});
    }
  }
  return out;
}

}  // namespace unicorn::adaptors
