#include "unicorn/metrics/caption.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>

#include "unicorn/core/error.hpp"

namespace unicorn::metrics {
namespace {

constexpr std::size_t kMaxOrder = 4;

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

void check_refs(const std::vector<Tokens>& refs, const char* what) {
  if (refs.empty()) fail("metric", std::string(what) + ": no references");
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (word_byte(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::map<std::string, std::size_t> ngram_counts(const Tokens& tokens, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

double bleu4(const Tokens& cand, const std::vector<Tokens>& refs, double eps) {
  check_refs(refs, "BLEU-4");
  if (cand.empty()) fail("metric", "BLEU-4: empty candidate");
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto cc = ngram_counts(cand, n);
    std::map<std::string, std::size_t> max_ref;
    for (const auto& r : refs)
      for (const auto& [g, k] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], k);
    std::size_t matched = 0, total = 0;
    for (const auto& [g, k] : cc) {
      total += k;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(k, it->second);
    }
    const double p = matched > 0 ? static_cast<double>(matched) / static_cast<double>(total)
                                 : eps / (static_cast<double>(total) + eps);
    log_sum += std::log(p);
  }
  const std::size_t c = cand.size();
  std::size_t r = refs.front().size();
  for (const auto& ref : refs) {
    const auto d_new = ref.size() > c ? ref.size() - c : c - ref.size();
    const auto d_old = r > c ? r - c : c - r;
    if (d_new < d_old || (d_new == d_old && ref.size() < r)) r = ref.size();
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / static_cast<double>(kMaxOrder));
}

double rouge_l(const Tokens& cand, const std::vector<Tokens>& refs, double beta) {
  check_refs(refs, "ROUGE-L");
  double best = 0.0;
  for (const auto& ref : refs) {
    const std::size_t l = lcs_length(cand, ref);
    if (l == 0) continue;
    const double p = static_cast<double>(l) / static_cast<double>(cand.size());
    const double r = static_cast<double>(l) / static_cast<double>(ref.size());
    const double b2 = beta * beta;
    best = std::max(best, (1.0 + b2) * p * r / (r + b2 * p));
  }
  return best;
}

CiderCorpus::CiderCorpus(const std::vector<Tokens>& documents) : n_docs_(documents.size()) {
  if (documents.empty()) fail("metric", "CIDEr: empty corpus");
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (std::size_t n = 1; n <= kMaxOrder; ++n)
      for (const auto& kv : ngram_counts(doc, n)) seen.insert(kv.first);
    for (const auto& g : seen) ++df_[g];
  }
}

double CiderCorpus::idf(const std::string& ngram) const {
  const auto it = df_.find(ngram);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + df)) + 1.0;
}

double cider(const Tokens& cand, const std::vector<Tokens>& refs, const CiderCorpus& corpus) {
  check_refs(refs, "CIDEr");
  double total = 0.0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto cc = ngram_counts(cand, n);
    double cnorm = 0.0;
    for (const auto& [g, k] : cc) {
      const double w = static_cast<double>(k) * corpus.idf(g);
      cnorm += w * w;
    }
    cnorm = std::sqrt(cnorm);
    double per_order = 0.0;
    for (const auto& ref : refs) {
      const auto rc = ngram_counts(ref, n);
      if (cc.empty() || rc.empty()) {
        per_order += cc.empty() && rc.empty() ? 1.0 : 0.0;
        continue;
      }
      double rnorm = 0.0, d = 0.0;
      for (const auto& [g, k] : rc) {
        const double idf = corpus.idf(g);
        const double w = static_cast<double>(k) * idf;
        rnorm += w * w;
        const auto it = cc.find(g);
        if (it != cc.end()) d += w * static_cast<double>(it->second) * idf;
      }
      per_order += d / (cnorm * std::sqrt(rnorm));
    }
    total += per_order / static_cast<double>(refs.size());
  }
  return total / static_cast<double>(kMaxOrder);
}

double meteor_lite(const Tokens& cand, const std::vector<Tokens>& refs) {
  check_refs(refs, "METEOR");
  double best = 0.0;
  for (const auto& ref : refs) {
    // Left-to-right alignment of each candidate token to the first unused
    // identical reference token.
    std::vector<bool> used(ref.size(), false);
    std::vector<long> align(cand.size(), -1);
    std::size_t m = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && ref[j] == cand[i]) {
          used[j] = true;
          align[i] = static_cast<long>(j);
          ++m;
          break;
        }
      }
    }
    if (m == 0) continue;
    std::size_t chunks = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (align[i] < 0) continue;
      const bool continues = i > 0 && align[i - 1] >= 0 && align[i] == align[i - 1] + 1;
      if (!continues) ++chunks;
    }
    const double p = static_cast<double>(m) / static_cast<double>(cand.size());
    const double r = static_cast<double>(m) / static_cast<double>(ref.size());
    const double fmean = 10.0 * p * r / (r + 9.0 * p);
    const double frag = static_cast<double>(chunks - 1) / static_cast<double>(m);
    best = std::max(best, fmean * (1.0 - 0.5 * frag * frag * frag));
  }
  return best;
}

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim == 0 || n == 0) fail("config", "hashed embedder needs positive dim and n");
}

std::vector<double> HashedNgramEmbedder::embed(std::string_view token) const {
  std::vector<double> v(dim_, 0.0);
  const std::string padded = "#" + std::string(token) + "#";
  const std::size_t n = std::min(n_, padded.size());
  for (std::size_t i = 0; i + n <= padded.size(); ++i) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t k = 0; k < n; ++k) {
      h ^= static_cast<unsigned char>(padded[i + k]);
      h *= 1099511628211ULL;
    }
    v[h % dim_] += 1.0;
  }
  const double norm = std::sqrt(dot(v, v));
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

double embedding_score(const Tokens& cand, const std::vector<Tokens>& refs, const TokenEmbedder& embedder) {
  check_refs(refs, "embedding score");
  if (cand.empty()) return 0.0;
  std::vector<std::vector<double>> ce;
  for (const auto& t : cand) ce.push_back(embedder.embed(t));
  double best = 0.0;
  for (const auto& ref : refs) {
    if (ref.empty()) continue;
    std::vector<std::vector<double>> re;
    for (const auto& t : ref) re.push_back(embedder.embed(t));
    std::vector<double> best_c(ce.size(), 0.0), best_r(re.size(), 0.0);
    for (std::size_t i = 0; i < ce.size(); ++i) {
      for (std::size_t j = 0; j < re.size(); ++j) {
        const double s = std::clamp(dot(ce[i], re[j]), 0.0, 1.0);
        best_c[i] = std::max(best_c[i], s);
        best_r[j] = std::max(best_r[j], s);
      }
    }
    double p = 0.0, r = 0.0;
    for (double s : best_c) p += s;
    for (double s : best_r) r += s;
    p /= static_cast<double>(ce.size());
    r /= static_cast<double>(re.size());
    if (p + r > 0.0) best = std::max(best, 2.0 * p * r / (p + r));
  }
  return best;
}

CaptionScores caption_score(std::string_view pred, const std::vector<std::string>& refs, const CiderCorpus& corpus,
                            const TokenEmbedder& embedder) {
  const Tokens cand = tokenize(pred);
  if (cand.empty()) fail("metric", "caption score: empty prediction");
  if (refs.empty()) fail("metric", "caption score: no references");
  std::vector<Tokens> rt;
  for (const auto& r : refs) rt.push_back(tokenize(r));
  CaptionScores s;
  s.bleu4 = bleu4(cand, rt);
  s.rouge_l = rouge_l(cand, rt);
  s.cider = cider(cand, rt, corpus);
  s.meteor = meteor_lite(cand, rt);
  s.embedding = embedding_score(cand, rt, embedder);
  s.composite = (s.bleu4 + s.rouge_l + s.cider + s.meteor + s.embedding) / 5.0;
  return s;
}

}  // namespace unicorn::metrics
