#include "unicorn/harness/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "unicorn/core/error.hpp"

namespace unicorn::harness {
namespace {

double percentile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool is_dense(const TaskConfigDocument& c) {
  return c.task_type == TaskType::detection || c.task_type == TaskType::segmentation;
}

// Whitespace tokens with surrounding punctuation trimmed, plus offsets.
struct Word {
  std::size_t start, end;
  std::string text;
};

std::vector<Word> words(const std::string& text) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t s = i, e = j;
    while (s < e && text[s] == '(') ++s;
    while (e > s && std::string_view(".,;:)").find(text[e - 1]) != std::string_view::npos) --e;
    if (e > s) out.push_back({s, e, text.substr(s, e - s)});
    i = j;
  }
  return out;
}

std::string shape(const std::string& w) {
  std::string s;
  for (unsigned char c : w) {
    const char k = std::isupper(c) ? 'X' : std::islower(c) ? 'x' : std::isdigit(c) ? 'd' : static_cast<char>(c);
    if (s.empty() || s.back() != k) s += k;
  }
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string cue_at(const std::vector<Word>& w, std::size_t i) { return i == 0 ? "^" : lower(w[i - 1].text); }

std::string shape_run(const std::vector<Word>& w, std::size_t i, std::size_t m) {
  std::string s;
  for (std::size_t k = 0; k < m; ++k) s += (k ? " " : "") + shape(w[i + k].text);
  return s;
}

using Freq = std::map<std::string, double>;

Freq frequencies(const std::string& text) {
  Freq f;
  for (auto& t : report_tokens(text)) f[t] += 1.0;
  return f;
}

double cosine(const Freq& a, const Freq& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

Prediction as_prediction(const ReferenceLabel& label, OutputShape output) {
  auto mismatch = [&]() -> Prediction {
    fail("invalid_input", "few-shot label " + std::string(variant_name(label)) + " does not fit output " +
                              std::string(to_string(output)));
  };
  switch (output) {
    case OutputShape::class_label_per_case:
      if (const auto* c = std::get_if<ClassLabel>(&label)) return *c;
      return mismatch();
    case OutputShape::probability_per_case:
      if (const auto* c = std::get_if<ClassLabel>(&label)) return Probability{c->value > 0 ? 1.0 : 0.0};
      if (const auto* p = std::get_if<Probability>(&label)) return *p;
      return mismatch();
    case OutputShape::continuous_per_case:
      if (const auto* c = std::get_if<Continuous>(&label)) return *c;
      return mismatch();
    case OutputShape::paired_class_labels:
      if (const auto* c = std::get_if<PairedLabels>(&label)) return *c;
      return mismatch();
    case OutputShape::multi_label_probabilities:
    case OutputShape::multi_continuous_per_case:
      if (const auto* c = std::get_if<MultiLabel>(&label)) return *c;
      return mismatch();
    default: return mismatch();
  }
}

}  // namespace

std::vector<double> intensity_features(std::vector<double> v, int feature_dim) {
  if (feature_dim <= kStatisticCount) fail("config", "feature_dim must exceed " + std::to_string(kStatisticCount));
  if (v.empty()) fail("invalid_input", "no voxels to summarise");
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
  for (double x : v) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    mad += std::abs(d);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  mad /= n;
  const double sd = std::sqrt(m2);
  const bool spread = m2 > 1e-24;

  const auto bins = static_cast<std::size_t>(feature_dim - kStatisticCount);
  std::vector<double> hist(bins, 0.0);
  for (double x : v) {
    const double c = std::clamp(x, 0.0, 1.0);
    hist[std::min(bins - 1, static_cast<std::size_t>(c * static_cast<double>(bins)))] += 1.0 / n;
  }

  std::sort(v.begin(), v.end());
  const double p25 = percentile(v, 0.25), p75 = percentile(v, 0.75);
  std::vector<double> f{mean,
                        m2,
                        sd,
                        v.front(),
                        v.back(),
                        percentile(v, 0.05),
                        percentile(v, 0.10),
                        p25,
                        percentile(v, 0.50),
                        p75,
                        percentile(v, 0.90),
                        percentile(v, 0.95),
                        p75 - p25,
                        spread ? m3 / (m2 * sd) : 0.0,
                        spread ? m4 / (m2 * m2) - 3.0 : 0.0,
                        mad};
  if (!spread) f[1] = f[2] = f[12] = f[15] = 0.0;
  f.insert(f.end(), hist.begin(), hist.end());
  return f;
}

std::vector<std::size_t> tile_shape(std::size_t rank) {
  if (rank == 3) return {2, 8, 8};
  return std::vector<std::size_t>(rank, 8);
}

Representation baseline_extract(const CasePayload& payload, const TaskConfigDocument& config, int feature_dim) {
  const VisionGrid* vision = vision_of(payload);
  if (!vision) fail("invalid_input", "baseline extractor needs a vision payload");
  const auto& img = vision->image;
  Representation rep;

  if (!is_dense(config)) {
    std::vector<double> values;
    if (vision->tissue_mask) {
      for (std::size_t f = 0; f < img.size(); ++f)
        if ((*vision->tissue_mask)[f] != 0) values.push_back(img[f]);
      if (values.empty()) fail("invalid_input", "empty tissue mask");
    } else {
      values = img.values;
    }
    rep.kind = RepresentationKind::case_level;
    rep.case_features = intensity_features(std::move(values), feature_dim);
    return rep;
  }

  rep.kind = RepresentationKind::patch_level;
  const auto tile = tile_shape(img.rank());
  std::vector<std::size_t> tiles(img.rank());
  for (std::size_t a = 0; a < img.rank(); ++a) tiles[a] = (img.dims[a] + tile[a] - 1) / tile[a];
  const Grid<char> tile_grid(tiles, img.spacing);
  for (std::size_t t = 0; t < tile_grid.size(); ++t) {
    const auto tidx = tile_grid.unravel(t);
    PatchFeature p;
    p.spacing = img.spacing;
    std::vector<std::size_t> extent(img.rank());
    for (std::size_t a = 0; a < img.rank(); ++a) {
      const std::size_t start = tidx[a] * tile[a];
      extent[a] = std::min(tile[a], img.dims[a] - start);
      p.coord.push_back(static_cast<long>(start));
      p.size.push_back(static_cast<long>(extent[a]));
    }
    const Grid<char> local(extent, img.spacing);
    std::vector<double> values;
    values.reserve(local.size());
    std::vector<std::size_t> idx(img.rank());
    for (std::size_t f = 0; f < local.size(); ++f) {
      const auto l = local.unravel(f);
      for (std::size_t a = 0; a < img.rank(); ++a) idx[a] = static_cast<std::size_t>(p.coord[a]) + l[a];
      values.push_back(img[img.index(idx)]);
    }
    p.features = intensity_features(std::move(values), feature_dim);
    rep.patches.push_back(std::move(p));
  }
  return rep;
}

std::vector<std::string> report_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    const bool decimal = c == '.' && !cur.empty() && std::isdigit(static_cast<unsigned char>(cur.back())) &&
                         i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (std::isalnum(c) || decimal) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void SpanRules::fit(const std::vector<std::pair<std::string, EntitySpans>>& examples) {
  std::map<std::tuple<std::string, std::size_t, std::string>, std::map<std::string, int>> votes;
  for (const auto& [text, spans] : examples) {
    const auto w = words(text);
    for (const auto& s : spans.spans) {
      auto first = std::find_if(w.begin(), w.end(), [&](const Word& x) { return x.start == s.start; });
      auto last = std::find_if(w.begin(), w.end(), [&](const Word& x) { return x.end == s.end; });
      if (first == w.end() || last == w.end() || last < first) continue;
      const auto i = static_cast<std::size_t>(first - w.begin());
      const auto m = static_cast<std::size_t>(last - first) + 1;
      votes[{cue_at(w, i), m, shape_run(w, i, m)}][s.tag] += 1;
    }
  }
  rules_.clear();
  for (const auto& [key, tags] : votes) {
    // map order makes the smallest tag win ties
    auto best = tags.begin();
    for (auto it = tags.begin(); it != tags.end(); ++it)
      if (it->second > best->second) best = it;
    rules_[key] = best->first;
  }
}

EntitySpans SpanRules::apply(const std::string& text) const {
  EntitySpans out;
  const auto w = words(text);
  std::size_t i = 0;
  while (i < w.size()) {
    const auto cue = cue_at(w, i);
    std::size_t taken = 0;
    // longest rule first; among equal lengths the map order decides
    std::size_t max_len = 0;
    for (const auto& [key, tag] : rules_) max_len = std::max(max_len, std::get<1>(key));
    for (std::size_t m = std::min(max_len, w.size() - i); m > 0 && !taken; --m) {
      auto it = rules_.lower_bound({cue, m, std::string()});
      const auto sh = shape_run(w, i, m);
      for (; it != rules_.end() && std::get<0>(it->first) == cue && std::get<1>(it->first) == m; ++it) {
        if (std::get<2>(it->first) != sh) continue;
        out.spans.push_back({w[i].start, w[i + m - 1].end, it->second});
        taken = m;
        break;
      }
    }
    i += taken ? taken : 1;
  }
  return out;
}

std::vector<Prediction> baseline_language(const orchestrator::LanguageBatch& batch, const TaskConfigDocument& config) {
  if (batch.few_shot.empty()) fail("invalid_input", "language batch has no few-shot reports");
  std::vector<Prediction> out;
  if (config.output == OutputShape::entity_spans) {
    std::vector<std::pair<std::string, EntitySpans>> examples;
    for (const auto& item : batch.few_shot) {
      const auto* spans = std::get_if<EntitySpans>(&item.label);
      if (!spans) fail("invalid_input", "few-shot label is not an entity span set");
      examples.emplace_back(item.report.text, *spans);
    }
    SpanRules rules;
    rules.fit(examples);
    for (const auto& r : batch.evaluation) out.push_back(rules.apply(r.text));
    return out;
  }
  std::vector<Freq> few;
  for (const auto& item : batch.few_shot) few.push_back(frequencies(item.report.text));
  for (const auto& r : batch.evaluation) {
    const auto f = frequencies(r.text);
    std::size_t best = 0;
    double best_sim = -1.0;
    for (std::size_t j = 0; j < few.size(); ++j) {
      const double s = cosine(f, few[j]);
      if (s > best_sim) {
        best_sim = s;
        best = j;
      }
    }
    out.push_back(as_prediction(batch.few_shot[best].label, config.output));
  }
  return out;
}

Caption baseline_caption(const VisionWithTaskDescription& payload) {
  std::vector<std::string> candidates;
  std::istringstream in(payload.description);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("- ", 0) == 0 && line.size() > 2) candidates.push_back(line.substr(2));
  if (candidates.empty()) fail("invalid_input", "task description lists no candidate captions");
  std::vector<Freq> f;
  for (const auto& c : candidates) f.push_back(frequencies(c));
  std::size_t best = 0;
  double best_sum = -1.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
      if (j != i) s += cosine(f[i], f[j]);
    if (s > best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return Caption{candidates[best]};
}

BaselineAlgorithm::BaselineAlgorithm(int feature_dim) : feature_dim_(feature_dim) {
  if (feature_dim <= kStatisticCount) fail("config", "feature_dim must exceed " + std::to_string(kStatisticCount));
}

Representation BaselineAlgorithm::extract(const CasePayload& payload, const TaskConfigDocument& config,
                                          const orchestrator::AlgorithmContext&) const {
  return baseline_extract(payload, config, feature_dim_);
}

std::vector<Prediction> BaselineAlgorithm::predict_batch(const orchestrator::LanguageBatch& batch,
                                                         const TaskConfigDocument& config,
                                                         const orchestrator::AlgorithmContext&) const {
  return baseline_language(batch, config);
}

Prediction BaselineAlgorithm::predict_case(const VisionWithTaskDescription& payload, const TaskConfigDocument&,
                                           const orchestrator::AlgorithmContext&) const {
  return baseline_caption(payload);
}

void register_baseline(int feature_dim) {
  orchestrator::register_algorithm("baseline", [feature_dim] { return std::make_unique<BaselineAlgorithm>(feature_dim); });
}

}  // namespace unicorn::harness
