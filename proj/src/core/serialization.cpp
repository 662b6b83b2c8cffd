#include "unicorn/core/serialization.hpp"

namespace unicorn {
namespace {

json point_json(const ScoredPoint& p) { return json{{"coord", p.coord}, {"confidence", p.confidence}}; }

template <typename T>
json alt_json(const T& v);

template <>
json alt_json(const ClassLabel& v) { return {{"value", v.value}}; }
template <>
json alt_json(const Probability& v) { return {{"value", v.value}}; }
template <>
json alt_json(const ProbabilityVector& v) { return {{"values", v.values}}; }
template <>
json alt_json(const Continuous& v) { return {{"value", v.value}}; }
template <>
json alt_json(const PointSet& v) {
  json pts = json::array();
  for (const auto& p : v.points) pts.push_back(point_json(p));
  json j{{"points", pts}};
  if (v.case_probability) j["case_probability"] = *v.case_probability;
  return j;
}
template <>
json alt_json(const Mask& v) { return grid_to_json(v.grid); }
template <>
json alt_json(const EntitySpans& v) {
  json spans = json::array();
  for (const auto& s : v.spans) spans.push_back({{"start", s.start}, {"end", s.end}, {"tag", s.tag}});
  return {{"spans", spans}};
}
template <>
json alt_json(const Caption& v) { return {{"text", v.text}}; }
template <>
json alt_json(const MultiLabel& v) { return {{"values", v.values}}; }
template <>
json alt_json(const PairedLabels& v) { return {{"left", v.left}, {"right", v.right}}; }
template <>
json alt_json(const SurvivalLabel& v) { return {{"event", v.event}, {"time_years", v.time_years}}; }
template <>
json alt_json(const LesionRefs& v) {
  json arr = json::array();
  for (const auto& l : v.lesions) arr.push_back({{"coord", l.coord}, {"equivalent_diameter_mm", l.equivalent_diameter_mm}});
  return {{"lesions", arr}};
}

ReferenceLabel tagged_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "class_label") return ClassLabel{j.at("value").get<int>()};
  if (type == "probability") return Probability{j.at("value").get<double>()};
  if (type == "probability_vector") return ProbabilityVector{j.at("values").get<std::vector<double>>()};
  if (type == "continuous") return Continuous{j.at("value").get<double>()};
  if (type == "point_set") {
    PointSet ps;
    for (const auto& p : j.at("points"))
      ps.points.push_back({p.at("coord").get<std::vector<double>>(), p.at("confidence").get<double>()});
    if (j.contains("case_probability")) ps.case_probability = j.at("case_probability").get<double>();
    return ps;
  }
  if (type == "mask") return Mask{int_grid_from_json(j)};
  if (type == "entity_spans") {
    EntitySpans es;
    for (const auto& s : j.at("spans"))
      es.spans.push_back({s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(), s.at("tag").get<std::string>()});
    return es;
  }
  if (type == "caption") return Caption{j.at("text").get<std::string>()};
  if (type == "multi_label") return MultiLabel{j.at("values").get<std::map<std::string, double>>()};
  if (type == "paired_labels") return PairedLabels{j.at("left").get<int>(), j.at("right").get<int>()};
  if (type == "survival_label") return SurvivalLabel{j.at("event").get<bool>(), j.at("time_years").get<double>()};
  if (type == "lesion_refs") {
    LesionRefs lr;
    for (const auto& l : j.at("lesions"))
      lr.lesions.push_back({l.at("coord").get<std::vector<double>>(), l.at("equivalent_diameter_mm").get<double>()});
    return lr;
  }
  fail("io", "unknown label type '" + type + "'");
}

template <typename Variant>
json variant_json(const Variant& v) {
  json j = std::visit([](const auto& alt) { return alt_json(alt); }, v);
  j["type"] = std::string(variant_name(v));
  return j;
}

}  // namespace

json grid_to_json(const Grid<int>& g) { return {{"dims", g.dims}, {"spacing", g.spacing}, {"values", g.values}}; }

Grid<int> int_grid_from_json(const json& j) {
  Grid<int> g;
  g.dims = j.at("dims").get<std::vector<std::size_t>>();
  g.spacing = j.at("spacing").get<std::vector<double>>();
  g.values = j.at("values").get<std::vector<int>>();
  check_grid(g, "mask");
  return g;
}

json to_json(const Prediction& p) { return variant_json(p); }

Prediction prediction_from_json(const json& j) {
  try {
    ReferenceLabel r = tagged_from_json(j);
    return std::visit(
        [](auto&& alt) -> Prediction {
          using T = std::decay_t<decltype(alt)>;
          if constexpr (std::is_same_v<T, SurvivalLabel> || std::is_same_v<T, LesionRefs>) {
            fail("io", "label-only type used as prediction");
          } else {
            return alt;
          }
        },
        std::move(r));
  } catch (const json::exception& e) {
    fail("io", std::string("malformed prediction: ") + e.what());
  }
}

json to_json(const ReferenceLabel& r) { return variant_json(r); }

ReferenceLabel reference_from_json(const json& j) {
  try {
    return tagged_from_json(j);
  } catch (const json::exception& e) {
    fail("io", std::string("malformed label: ") + e.what());
  }
}

json to_json(const Representation& r) {
  json j;
  j["case_id"] = r.case_id;
  j["kind"] = r.kind == RepresentationKind::case_level ? "case_level" : "patch_level";
  if (r.kind == RepresentationKind::case_level) {
    j["case_features"] = r.case_features;
  } else {
    json patches = json::array();
    for (const auto& p : r.patches)
      patches.push_back({{"coord", p.coord}, {"size", p.size}, {"spacing", p.spacing}, {"features", p.features}});
    j["patches"] = patches;
  }
  return j;
}

Representation representation_from_json(const json& j) {
  Representation r;
  r.case_id = j.at("case_id").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "case_level") {
    r.kind = RepresentationKind::case_level;
    r.case_features = j.at("case_features").get<std::vector<double>>();
  } else if (kind == "patch_level") {
    r.kind = RepresentationKind::patch_level;
    for (const auto& p : j.at("patches"))
      r.patches.push_back({p.at("coord").get<std::vector<long>>(), p.at("size").get<std::vector<long>>(),
                           p.at("spacing").get<std::vector<double>>(), p.at("features").get<std::vector<double>>()});
  } else {
    fail("io", "unknown representation kind '" + kind + "'");
  }
  return r;
}

json to_json(const TaskDefinition& t) {
  json j;
  j["task_id"] = t.task_id;
  j["name"] = t.name;
  j["task_type"] = std::string(to_string(t.task_type));
  j["domain"] = std::string(to_string(t.domain));
  j["modality"] = std::string(to_string(t.modality));
  j["metric_spec"] = std::string(to_string(t.metric_spec));
  j["metric_label"] = t.metric_label;
  j["output"] = std::string(to_string(t.output));
  j["counts"] = {{"few_shot", t.counts.few_shot}, {"validation", t.counts.validation}, {"test", t.counts.test}};
  j["time_limit_minutes"] = {{"validation", t.time_limit.validation_minutes}, {"test", t.time_limit.test_minutes}};
  j["norm"] = {{"s_ref", t.norm.s_ref}, {"s_max", t.norm.s_max}};
  j["params"] = {{"num_classes", t.params.num_classes},
                 {"foreground_classes", t.params.foreground_classes},
                 {"label_names", t.params.label_names},
                 {"epsilons", t.params.epsilons},
                 {"hit_radius", t.params.hit_radius}};
  return j;
}

TaskDefinition task_from_json(const json& j) {
  TaskDefinition t;
  t.task_id = j.at("task_id").get<int>();
  t.name = j.at("name").get<std::string>();
  t.task_type = parse_task_type(j.at("task_type").get<std::string>());
  t.domain = parse_domain(j.at("domain").get<std::string>());
  t.modality = parse_modality(j.at("modality").get<std::string>());
  t.metric_spec = parse_metric_spec(j.at("metric_spec").get<std::string>());
  t.metric_label = j.at("metric_label").get<std::string>();
  t.output = parse_output_shape(j.at("output").get<std::string>());
  const auto& c = j.at("counts");
  t.counts = {c.at("few_shot").get<int>(), c.at("validation").get<int>(), c.at("test").get<int>()};
  const auto& tl = j.at("time_limit_minutes");
  t.time_limit = {tl.at("validation").get<int>(), tl.at("test").get<int>()};
  t.norm = {j.at("norm").at("s_ref").get<double>(), j.at("norm").at("s_max").get<double>()};
  const auto& p = j.at("params");
  t.params.num_classes = p.at("num_classes").get<int>();
  t.params.foreground_classes = p.at("foreground_classes").get<std::vector<int>>();
  t.params.label_names = p.at("label_names").get<std::vector<std::string>>();
  t.params.epsilons = p.at("epsilons").get<std::vector<double>>();
  t.params.hit_radius = p.at("hit_radius").get<double>();
  return t;
}

std::string dump_stable(const json& j) { return j.dump(2) + "\n"; }

}  // namespace unicorn
