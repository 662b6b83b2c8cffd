#include "unicorn/core/validation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace unicorn {
namespace {

bool finite(double v) { return std::isfinite(v); }
bool unit(double v) { return finite(v) && v >= 0.0 && v <= 1.0; }

std::string range_text(int k) { return "0.." + std::to_string(k - 1); }

class Checker {
 public:
  Checker(const TaskDefinition& task, const ArchiveItem& item) : task_(task), item_(item) {}

  std::vector<std::string> violations;

  void add(std::string v) { violations.push_back(std::move(v)); }

  template <typename T>
  const T* expect(const Prediction& p) {
    const T* v = std::get_if<T>(&p);
    if (!v) {
      std::ostringstream os;
      os << "wrong prediction variant for task " << task_.task_id << ": got " << variant_name(p);
      add(os.str());
    }
    return v;
  }

  void label_range(int label) {
    const int k = task_.params.num_classes;
    if (k > 0 && (label < 0 || label >= k)) add("label out of range " + range_text(k));
  }

  const Grid<double>* grid() const {
    const VisionGrid* v = vision_of(item_.payload);
    return v ? &v->image : nullptr;
  }

  std::size_t text_length() const {
    if (const auto* r = std::get_if<ReportText>(&item_.payload)) return r->text.size();
    return 0;
  }

  void points(const PointSet& ps, bool need_case_probability) {
    const auto* g = grid();
    for (const auto& pt : ps.points) {
      if (g && pt.coord.size() != g->rank()) {
        add("point dimensionality differs from case grid rank");
        break;
      }
      bool ok = true;
      for (double c : pt.coord) ok = ok && finite(c);
      if (!ok) add("non-finite point coordinate");
      if (!unit(pt.confidence)) add("point confidence outside [0,1]");
    }
    if (need_case_probability) {
      if (!ps.case_probability) add("missing case probability");
      else if (!unit(*ps.case_probability)) add("case probability outside [0,1]");
    } else if (ps.case_probability && !unit(*ps.case_probability)) {
      add("case probability outside [0,1]");
    }
  }

  void mask(const Mask& m) {
    const auto* g = grid();
    if (!g || m.grid.dims != g->dims) {
      add("mask/grid shape mismatch");
      return;
    }
    if (m.grid.values.size() != Grid<int>::count(m.grid.dims)) {
      add("mask value count mismatch");
      return;
    }
    const int k = task_.params.num_classes;
    for (int v : m.grid.values) {
      if (v < 0 || (k > 0 && v >= k)) {
        add(k > 0 ? "mask label out of range " + range_text(k) : "negative mask label");
        break;
      }
    }
  }

  void spans(const EntitySpans& es) {
    const std::size_t n = text_length();
    for (const auto& s : es.spans) {
      if (s.end <= s.start) add("span end must exceed start");
      else if (s.end > n) add("span out of text bounds");
      if (s.tag.empty()) add("span tag is empty");
    }
  }

  void multi(const MultiLabel& ml, bool probabilities) {
    const auto& names = task_.params.label_names;
    if (ml.values.size() != names.size()) add("multi-label key set differs from task labels");
    for (const auto& n : names) {
      auto it = ml.values.find(n);
      if (it == ml.values.end()) {
        add("missing label '" + n + "'");
        continue;
      }
      if (probabilities ? !unit(it->second) : !finite(it->second)) add("invalid value for label '" + n + "'");
    }
  }

 private:
  const TaskDefinition& task_;
  const ArchiveItem& item_;
};

}  // namespace

std::string ValidationReport::summary() const {
  std::string s;
  for (const auto& v : violations) s += (s.empty() ? "" : "; ") + v;
  return s;
}

ValidationReport validate_prediction(const TaskDefinition& task, const Prediction& prediction, const ArchiveItem& item) {
  Checker c(task, item);
  switch (task.output) {
    case OutputShape::class_label_per_case:
      if (const auto* v = c.expect<ClassLabel>(prediction)) c.label_range(v->value);
      break;
    case OutputShape::probability_per_case:
      if (const auto* v = c.expect<Probability>(prediction)) {
        if (!finite(v->value)) c.add("non-finite value");
        else if (!unit(v->value)) c.add("probability outside [0,1]");
      }
      break;
    case OutputShape::continuous_per_case:
      if (const auto* v = c.expect<Continuous>(prediction))
        if (!finite(v->value)) c.add("non-finite value");
      break;
    case OutputShape::point_set:
    case OutputShape::point_set_with_confidence:
      if (const auto* v = c.expect<PointSet>(prediction)) c.points(*v, false);
      break;
    case OutputShape::point_set_with_case_probability:
      if (const auto* v = c.expect<PointSet>(prediction)) c.points(*v, true);
      break;
    case OutputShape::segmentation_mask:
      if (const auto* v = c.expect<Mask>(prediction)) c.mask(*v);
      break;
    case OutputShape::paired_class_labels:
      if (const auto* v = c.expect<PairedLabels>(prediction)) {
        c.label_range(v->left);
        c.label_range(v->right);
      }
      break;
    case OutputShape::multi_label_probabilities:
      if (const auto* v = c.expect<MultiLabel>(prediction)) c.multi(*v, true);
      break;
    case OutputShape::multi_continuous_per_case:
      if (const auto* v = c.expect<MultiLabel>(prediction)) c.multi(*v, false);
      break;
    case OutputShape::entity_spans:
      if (const auto* v = c.expect<EntitySpans>(prediction)) c.spans(*v);
      break;
    case OutputShape::caption_text:
      if (const auto* v = c.expect<Caption>(prediction))
        if (std::none_of(v->text.begin(), v->text.end(), [](char ch) {
              const auto u = static_cast<unsigned char>(ch);
              return u >= 0x80 || std::isalnum(u);
            }))
          c.add("caption has no tokens");
      break;
  }
  return ValidationReport{std::move(c.violations)};
}

}  // namespace unicorn
