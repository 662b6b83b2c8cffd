#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace unicorn::metrics {

using Tokens = std::vector<std::string>;

/// Lowercased maximal runs of ASCII alphanumerics (bytes >= 0x80 are kept as
/// word characters so UTF-8 text stays in one token).
Tokens tokenize(std::string_view text);

/// Corpus BLEU-4 for one candidate against a reference set: clipped n-gram
/// precision for n = 1..4, geometric mean, brevity penalty against the
/// closest reference length (shorter wins ties). A zero match count at order
/// n is smoothed to eps / (total + eps).
double bleu4(const Tokens& cand, const std::vector<Tokens>& refs, double eps = 1e-9);

/// LCS F-measure, best over references.
double rouge_l(const Tokens& cand, const std::vector<Tokens>& refs, double beta = 1.2);

/// Document frequencies for CIDEr. Each document is one tokenized caption.
class CiderCorpus {
 public:
  explicit CiderCorpus(const std::vector<Tokens>& documents);

  /// log((1 + N) / (1 + df)) + 1
  double idf(const std::string& ngram) const;
  std::size_t size() const { return n_docs_; }

 private:
  std::map<std::string, std::size_t> df_;
  std::size_t n_docs_ = 0;
};

/// n-grams of order n joined by a single space.
std::map<std::string, std::size_t> ngram_counts(const Tokens& tokens, std::size_t n);

/// Mean over n = 1..4 of the mean over references of the TF-IDF cosine.
/// No x10 scaling, so the result is in [0, 1].
double cider(const Tokens& cand, const std::vector<Tokens>& refs, const CiderCorpus& corpus);

/// Exact-match unigram METEOR: Fmean = 10PR / (R + 9P) times
/// (1 - 0.5 ((chunks - 1) / matches)^3). Best over references.
double meteor_lite(const Tokens& cand, const std::vector<Tokens>& refs);

class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  /// Unit-norm (or all-zero) embedding of one token.
  virtual std::vector<double> embed(std::string_view token) const = 0;
};

/// Hashed character-trigram bag (FNV-1a), L2 normalized. The token is padded
/// with '#' on both sides before slicing.
class HashedNgramEmbedder final : public TokenEmbedder {
 public:
  explicit HashedNgramEmbedder(std::size_t dim = 256, std::size_t n = 3);
  std::vector<double> embed(std::string_view token) const override;

 private:
  std::size_t dim_;
  std::size_t n_;
};

/// Greedy token matching in embedding space: precision and recall from the
/// best cosine for each token, combined as F1. Best over references.
double embedding_score(const Tokens& cand, const std::vector<Tokens>& refs, const TokenEmbedder& embedder);

struct CaptionScores {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double cider = 0.0;
  double meteor = 0.0;
  double embedding = 0.0;
  double composite = 0.0;
};

/// Unweighted mean of the five parts. Throws on an empty prediction or an
/// empty reference set.
CaptionScores caption_score(std::string_view pred, const std::vector<std::string>& refs, const CiderCorpus& corpus,
                            const TokenEmbedder& embedder);

}  // namespace unicorn::metrics
